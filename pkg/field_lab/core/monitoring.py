import logging
import math

from django.utils import timezone

logger = logging.getLogger(__name__)


class Monitoring:
    """
    Records per-row metrics and events of a scenario run.

    Without ``record=True`` nothing touches the database and metrics only reach
    the log. Database failures are logged and swallowed so that a broken
    record store never aborts a run.
    """

    def __init__(self, record=False):
        self.record = record
        self.run = None

    def start_run(self, config, output_dir=""):
        logger.info(
            "starting %s run (config %s, seed %s)",
            config.subcommand,
            config.config_hash()[:12],
            config.seed,
        )
        if not self.record:
            return None
        try:
            from field_lab.models import ScenarioRun
            from .utils import serialize

            self.run = ScenarioRun.objects.create(
                subcommand=config.subcommand,
                config_hash=config.config_hash(),
                seed=config.seed,
                config_json=serialize(config.as_dict()),
                output_dir=str(output_dir),
            )
        except Exception as exc:
            logger.warning("could not create run record: %s", exc)
            self.run = None
        return self.run

    def finish_run(self, status, exit_code):
        logger.info("run finished with status %s (exit %s)", status, exit_code)
        if self.run is None:
            return
        try:
            self.run.status = status
            self.run.exit_code = exit_code
            self.run.finished_at = timezone.now()
            self.run.save(update_fields=["status", "exit_code", "finished_at"])
        except Exception as exc:
            logger.warning("could not close run record: %s", exc)

    def record_row(self, row, step=0, t=0.0):
        """Store every numeric entry of a result row as a metric."""
        for key, value in row.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                continue
            if not math.isfinite(float(value)):
                self.raise_alert(f"{key} is not finite at step {step}")
                continue
            self._log_metric(step, t, key, float(value))

    def record_snapshot(self, step, path):
        self._log_event("SNAPSHOT", f"step {step}: {path}")

    def record_check(self, name, residual, tolerance):
        passed = residual <= tolerance
        if not passed:
            self.raise_alert(f"{name}: residual {residual:.3e} above tolerance {tolerance:.3e}")
        else:
            logger.debug("%s: residual %.3e", name, residual)
        return passed

    def raise_alert(self, message, severity="WARNING"):
        logger.log(logging.getLevelName(severity), message)
        self._log_event(f"ALERT_{severity}", message)

    def _log_metric(self, step, t, metric_type, value):
        if self.run is None:
            return
        try:
            from field_lab.models import MetricLog

            MetricLog.objects.create(
                run=self.run, step=step, t=t, metric_type=metric_type, value=value
            )
        except Exception as exc:
            logger.warning("could not store metric %s: %s", metric_type, exc)

    def _log_event(self, event_type, message):
        if self.run is None:
            return
        try:
            from field_lab.models import RunEvent

            RunEvent.objects.create(run=self.run, event_type=event_type, message=message)
        except Exception as exc:
            logger.warning("could not store event %s: %s", event_type, exc)
