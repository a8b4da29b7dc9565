from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Field-module diagnostics: spherical divergence, falloff fit and lattice identities."
    subcommand = "diag"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.option(parser, "--charges", "diag.charges")
        self.option(parser, "--points", "diag.points", type=int)
        self.option(parser, "--step", "diag.step", type=float)
