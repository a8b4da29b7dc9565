from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Evolve a transverse free field with the exact spectral propagator."
    subcommand = "propagate"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.add_run_arguments(parser)
        self.add_initial_arguments(parser)
