from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Step the duality-symmetric Maxwell equations with electric and magnetic sources."
    subcommand = "dual"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.add_run_arguments(parser)
        self.option(parser, "--preset", "dual.preset")
        self.option(parser, "--magnetic-sign", "dual.magnetic_sign", type=float)
        self.option(parser, "--cfl", "dual.cfl", type=float)
        self.flag(parser, "--magnetic-world", "dual.magnetic_world")
