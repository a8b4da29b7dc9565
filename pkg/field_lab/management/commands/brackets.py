from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Check the Dirac constraint chain and canonical brackets on lattice states."
    subcommand = "brackets"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.option(parser, "--states", "brackets.states", type=int)
        self.option(parser, "--points", "brackets.points", type=int)
        self.option(parser, "--tolerance", "brackets.tolerance", type=float)
        self.flag(parser, "--numeric", "brackets.numeric")
