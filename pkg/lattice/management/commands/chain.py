from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Minimize the stretched periodic chain over n and l.'
    experiment = 'chain'

    def describe(self, result):
        super().describe(result)
        ell_star = result.summary['ell_star']
        if ell_star is not None:
            self.stdout.write(f'l* = {ell_star:.12g}')
        for n, ell in result.summary['chain']['first_fractured_ell'].items():
            self.stdout.write(f'n={n}: fractured from l={ell:.6g}')
