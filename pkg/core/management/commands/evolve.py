# core/management/commands/evolve.py
from core.evolve import ModeProblem, evolve, gaussian_pulse, lambda_sweep, save_solution
from core.geometry import make_params
from core.management.suite_command import SuiteCommand, float_list
from core.reports import emit_tables, norm_table, write_json
from core.models import SuiteReport


class Command(SuiteCommand):
    """
    Mode evolutions on a = 0 backgrounds and the Λ sweep.

    Run with:
    python manage.py evolve run --config run.toml
    python manage.py evolve sweep --lambdas 0,1e-4,1e-3,1e-2 --p 1
    """

    help = 'Time-domain evolution of the model equation and the Lambda-uniformity sweep'
    suite = 'evolve'

    def add_actions(self, actions):
        actions.add_parser('run', help='One evolution from the [params] and [grid] blocks')
        sweep = actions.add_parser('sweep', help='Uniformity constants over a Lambda list')
        sweep.add_argument('--lambdas', type=float_list, default=[0.0, 1e-4, 1e-3, 1e-2])
        sweep.add_argument('--p', type=float, default=1.0)

    @staticmethod
    def problem_kwargs(config):
        grid = config['grid']
        return {
            'n_r': grid['n_r'], 'radial_variable': grid['radial_variable'],
            'tau_max': grid['tau_max'] * config['params']['M'], 'report_every': grid['report_every'],
        }

    def action_run(self, config, options):
        block = config['params']
        params = make_params(block['M'], 0.0, block['Lambda'])
        problem = ModeProblem(params, **self.problem_kwargs(config))
        record = evolve(problem, *gaussian_pulse(problem))
        out = self.out_dir(config)
        save_solution(record, out / 'solution.npz')
        report = SuiteReport(suite='evolve_run', tables={'evolve_norms': norm_table(record.norms)})
        emit_tables(report, out)
        final = record.norms[-1]
        self.stdout.write(self.style.SUCCESS(
            f'τ={final.tau:.2f}  E={final.E:.4e}  E_p={final.E_p:.4e}  Mor={final.Mor:.4e}  → {out}'))

    def action_sweep(self, config, options):
        result = lambda_sweep(options['lambdas'], p=options['p'], M=config['params']['M'],
                              problem_kwargs=self.problem_kwargs(config), threads=config['run']['threads'])
        out = self.out_dir(config)
        name = f"evolve_sweep_p{options['p']:g}"
        emit_tables(SuiteReport(suite=name, tables={name: (result['columns'], result['rows'])}), out)
        write_json(out / f'{name}.json', {
            'p': options['p'],
            'ratio': result['ratio'],
            'window_order': result['window_order'],
            'rows': [dict(zip(result['columns'], row)) for row in result['rows']],
        })
        self.stdout.write(self.style.SUCCESS(f"C(Λ) spread {result['ratio']:.4f} → {out}"))
