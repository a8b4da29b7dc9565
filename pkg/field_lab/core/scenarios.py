import logging
import math
import os

import numpy as np
import pandas as pd

from . import brackets, clebsch, dualmaxwell, focksu2, majorana, propagator
from .errors import (
    ConstraintViolationError,
    FieldLabError,
    InvalidInputError,
    UnknownPresetError,
)
from .fields import (
    GridSpec,
    ScalarFieldGrid,
    SphericalSamples,
    VectorFieldGrid,
    curl,
    divergence,
    gradient,
    helmholtz_split,
    radial_falloff_fit,
    random_smooth_scalar,
    random_smooth_vector,
    spectral_divergence_norm,
    spherical_divergence,
    write_snapshot,
    write_snapshot_csv,
)
from .monitoring import Monitoring
from .presets import build_modes
from .utils import atomic_write_bytes, provenance_lines, relative_error, serialize, write_table

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("propagate", "majorana", "dual", "brackets", "fock", "clebsch", "diag")

CANONICAL_TOLERANCE = 1e-12
COMMUTATOR_TOLERANCE = 1e-13
CASIMIR_EIGEN_TOLERANCE = 1e-12
SPHERICAL_TOLERANCE = 1e-8
# observed second order means a ratio of 4 +- 20% when h halves
ORDER_RATIO_RANGE = (3.2, 4.8)


class ScenarioResult:
    """Tables, snapshots and summary values produced by one scenario."""

    def __init__(self, subcommand, monitoring):
        self.subcommand = subcommand
        self.monitoring = monitoring
        self.tables = {}
        self.snapshots = []
        self.summary = {}
        self.failures = []

    def add_table(self, name, frame):
        self.tables[name] = frame

    def add_snapshot(self, step, fields):
        for name, field in fields.items():
            self.snapshots.append((f"{self.subcommand}_{step:06d}_{name}", step, field))

    def check(self, name, residual, tolerance):
        passed = self.monitoring.record_check(name, residual, tolerance)
        if not passed:
            self.failures.append(name)
        return passed


def grid_from_config(config):
    return GridSpec(config["grid.n"], config["grid.h"], config["physics.c"])


def _positive_steps(config):
    steps, dt = config["run.steps"], config["run.dt"]
    if steps < 1:
        raise InvalidInputError(f"run.steps must be at least 1, got {steps!r}")
    if not math.isfinite(dt) or dt <= 0:
        raise InvalidInputError(f"run.dt must be positive, got {dt!r}")
    cadence = config["run.cadence"]
    if cadence < 0:
        raise InvalidInputError(f"run.cadence must be non-negative, got {cadence!r}")
    return steps, dt, cadence


def _point_label(point):
    return ",".join(str(int(i)) for i in point)


class ScenarioEngine:
    def __init__(self):
        self.monitoring = Monitoring()
        self.handlers = {
            "propagate": self.run_propagate,
            "majorana": self.run_majorana,
            "dual": self.run_dual,
            "brackets": self.run_brackets,
            "fock": self.run_fock,
            "clebsch": self.run_clebsch,
            "diag": self.run_diag,
        }

    def run(self, config, output_dir=None, record=False):
        """
        Execute the scenario named by ``config.subcommand`` and write its
        outputs. Nothing is written unless the computation finishes.
        Returns the list of written paths.
        """
        try:
            handler = self.handlers[config.subcommand]
        except KeyError:
            raise UnknownPresetError(
                f"unknown subcommand {config.subcommand!r}, expected one of {SUBCOMMANDS}"
            ) from None
        output_dir = output_dir or config["output.dir"]
        self.monitoring = Monitoring(record=record)
        self.monitoring.start_run(config, output_dir)
        result = ScenarioResult(config.subcommand, self.monitoring)
        try:
            handler(config, np.random.default_rng(config.seed), result)
            written = self.write_outputs(config, result, output_dir)
        except InvalidInputError as exc:
            self.monitoring.raise_alert(str(exc), "ERROR")
            self.monitoring.finish_run("invalid", 1)
            raise
        except FieldLabError as exc:
            self.monitoring.raise_alert(str(exc), "ERROR")
            self.monitoring.finish_run("failed", 2)
            raise
        except Exception as exc:
            self.monitoring.raise_alert(f"{type(exc).__name__}: {exc}", "ERROR")
            self.monitoring.finish_run("failed", 2)
            raise
        if result.failures:
            self.monitoring.finish_run("failed", 2)
            raise ConstraintViolationError(
                f"{len(result.failures)} checks failed: {', '.join(result.failures[:5])}"
            )
        self.monitoring.finish_run("ok", 0)
        return written

    def write_outputs(self, config, result, output_dir):
        os.makedirs(output_dir, exist_ok=True)
        header = provenance_lines(
            config.config_hash(), config.seed, {"subcommand": config.subcommand}
        )
        written = []
        for name, frame in result.tables.items():
            path = os.path.join(output_dir, f"{name}.csv")
            write_table(path, frame, header)
            written.append(path)
        for stem, step, field in result.snapshots:
            binary = os.path.join(output_dir, f"{stem}.bin")
            table = os.path.join(output_dir, f"{stem}.csv")
            write_snapshot(binary, field)
            write_snapshot_csv(table, field, header)
            self.monitoring.record_snapshot(step, binary)
            written.extend([binary, table])
        summary = {
            "provenance": {
                "config_hash": config.config_hash(),
                "seed": config.seed,
                "subcommand": config.subcommand,
                "tool": header[0].split("=", 1)[1],
            },
            "files": [os.path.basename(path) for path in written],
            "summary": result.summary,
        }
        path = os.path.join(output_dir, f"{config.subcommand}_summary.json")
        atomic_write_bytes(path, (serialize(summary) + "\n").encode("utf-8"))
        written.append(path)
        logger.info("wrote %d files to %s", len(written), output_dir)
        return written

    # -----------------------------------------------------------------------
    # propagate

    def run_propagate(self, config, rng, result):
        steps, dt, cadence = _positive_steps(config)
        initial = build_modes(grid_from_config(config), config, rng)
        energy0 = propagator.energy(initial)
        norm0 = initial.norm2()
        a0, e0, _ = propagator.synthesize(initial)
        result.summary.update(
            {
                "modes": int(np.count_nonzero(initial.amplitudes)),
                "mode_energy": energy0,
                "grid_energy": propagator.grid_energy(a0, e0),
                "zero_point_sum": propagator.zero_point_sum(initial),
            }
        )
        result.check(
            "mode/grid energy",
            relative_error(result.summary["grid_energy"], energy0),
            1e-10,
        )

        rows = []
        for index in range(1, steps + 1):
            t = index * dt
            # each row is evolved from the initial set by t = step * dt
            modes = propagator.evolve(initial, t)
            r1, r2, r3, r4 = propagator.maxwell_residuals(modes)
            value = propagator.energy(modes)
            row = {
                "step": index,
                "t": t,
                "energy": value,
                "norm2": modes.norm2(),
                "energy_drift": relative_error(value, energy0),
                "norm_drift": relative_error(modes.norm2(), norm0),
                "r1": r1,
                "r2": r2,
                "r3": r3,
                "r4": r4,
                "wave_residual": propagator.wave_equation_residual(modes),
            }
            rows.append(row)
            self.monitoring.record_row(row, index, t)
            if cadence and index % cadence == 0:
                a, e_field, h_field = propagator.synthesize(modes)
                result.add_snapshot(index, {"A": a, "E": e_field, "H": h_field})
                logger.info("step %d t=%.6g energy=%.15g", index, t, value)
        frame = pd.DataFrame(rows)
        result.add_table("propagate", frame)
        result.check("energy drift", float(frame["energy_drift"].max()), 1e-12)
        worst = float(frame[["r1", "r2", "r3", "r4", "wave_residual"]].to_numpy().max())
        result.check("maxwell residuals", worst, 1e-10)

    # -----------------------------------------------------------------------
    # majorana

    def run_majorana(self, config, rng, result):
        steps, dt, cadence = _positive_steps(config)
        convention = config["majorana.convention"]
        compare = config["majorana.compare"]
        initial = build_modes(grid_from_config(config), config, rng)
        spec = initial.spec
        _, e0, h0 = propagator.synthesize(initial)
        r = majorana.to_rs(e0, h0)
        spin = majorana.spin_matrices()
        result.summary.update(
            {
                "convention": convention,
                "spin_commutator_residual": spin.commutator_residual(),
                "spin_casimir_deviation": float(np.max(np.abs(spin.casimir() - 2.0 * np.eye(3)))),
                "pauli_commutator_residual": majorana.pauli_commutator_residual(),
                "pauli_casimir_deviation": float(
                    np.max(np.abs(majorana.pauli_casimir() - 0.75 * np.eye(2)))
                ),
                "helicity_spectrum": majorana.helicity_spectrum([0.0, 0.0, 1.0]).tolist(),
            }
        )
        result.check("spin commutators", result.summary["spin_commutator_residual"], 1e-15)
        result.check("spin casimir", result.summary["spin_casimir_deviation"], 0.0)
        result.check("pauli casimir", result.summary["pauli_casimir_deviation"], 0.0)

        plus0, minus0 = majorana.helicity_power(r)
        rows = []
        for index in range(1, steps + 1):
            t = index * dt
            r = majorana.evolve_rs(r, dt, convention)
            e_field, h_field = majorana.from_rs(r)
            plus, minus = majorana.helicity_power(r)
            row = {
                "step": index,
                "t": t,
                "energy": 0.5 * (e_field.inner(e_field) + h_field.inner(h_field)),
                "transversality": majorana.transversality_residual(r),
                "reality": majorana.reality_residual(r),
                "helicity_plus": plus,
                "helicity_minus": minus,
            }
            if compare:
                _, e_ref, h_ref = propagator.synthesize(propagator.evolve(initial, t))
                row["divergence"] = relative_error(
                    np.concatenate([e_field.values, h_field.values]),
                    np.concatenate([e_ref.values, h_ref.values]),
                )
            rows.append(row)
            self.monitoring.record_row(row, index, t)
            if cadence and index % cadence == 0:
                result.add_snapshot(index, {"E": e_field, "H": h_field})
        frame = pd.DataFrame(rows)
        result.add_table("majorana", frame)
        result.summary["helicity_drift"] = max(
            relative_error(frame["helicity_plus"].to_numpy(), np.full(len(frame), plus0)),
            relative_error(frame["helicity_minus"].to_numpy(), np.full(len(frame), minus0)),
        )
        if compare:
            result.check("majorana divergence", float(frame["divergence"].max()), 1e-10)
        logger.info("majorana run on %r finished after %d steps", spec, steps)

    # -----------------------------------------------------------------------
    # dual

    def run_dual(self, config, rng, result):
        steps, dt, cadence = _positive_steps(config)
        spec = grid_from_config(config)
        name = config["dual.preset"]
        try:
            builder = dualmaxwell.PRESETS[name]
        except KeyError:
            raise UnknownPresetError(
                f"unknown source preset {name!r}, expected one of {sorted(dualmaxwell.PRESETS)}"
            ) from None
        sign = config["dual.magnetic_sign"]
        if sign not in (dualmaxwell.VERBATIM_SIGN, dualmaxwell.CONVENTIONAL_SIGN):
            raise InvalidInputError(f"dual.magnetic_sign must be +1 or -1, got {sign!r}")
        if config["dual.cfl"] > 0:
            dt = config["dual.cfl"] * dualmaxwell.cfl_limit(spec)
        state, src = builder(
            spec,
            {
                "strength": config["dual.strength"],
                "frequency": config["dual.frequency"],
                "width": config["dual.width"],
            },
        )

        def on_row(index, current, row):
            self.monitoring.record_row(row, index, current.t)
            if cadence and index and index % cadence == 0:
                result.add_snapshot(
                    index,
                    {"E": VectorFieldGrid(spec, current.e), "H": VectorFieldGrid(spec, current.h)},
                )

        options = {
            "magnetic_sign": sign,
            "cadence": cadence,
            "tolerance": config["dual.continuity_tol"],
            "on_row": on_row,
        }
        if config["dual.magnetic_world"]:
            final, frame = dualmaxwell.magnetic_world_run(src, steps, dt, state, **options)
        else:
            final, frame = dualmaxwell.run(state, src, steps, dt, **options)
        result.add_table("dual", frame)

        for t, ce, cm, scale in dualmaxwell.continuity_samples(src, dt, steps, sign):
            result.check(f"continuity t={t:.6g}", max(ce, cm), config["dual.continuity_tol"] * scale)
        if src.is_static():
            # time-dependent sources only hold Gauss's law to O(dt^2)
            bound = dualmaxwell.DIV_E_TOLERANCE * steps * max(1.0, final.scale(), state.scale())
            for column in ("re", "rm"):
                growth = float((frame[column] - frame[column].iloc[0]).abs().max())
                result.check(f"gauss {column} growth", growth, bound)
        if src.is_vacuum():
            energies = frame["field_energy"].to_numpy()
            if energies[0] > 0:
                drift = float(np.max(np.abs(energies - energies[0])) / energies[0])
                result.check("field energy drift", drift, config["dual.energy_tol"])
        result.summary.update(
            {
                "preset": name,
                "dt": dt,
                "cfl_limit": dualmaxwell.cfl_limit(spec),
                "energy_first": float(frame["energy"].iloc[1 if len(frame) > 1 else 0]),
                "energy_last": float(frame["energy"].iloc[-1]),
                "max_re": float(frame["re"].max()),
                "max_rm": float(frame["rm"].max()),
            }
        )
        # same run in the units of the propagate scenario
        e_hl, h_hl = dualmaxwell.fields_to_heaviside_lorentz(final.e, final.h)
        result.summary.update(
            {
                "field_energy_hl_last": float(0.5 * (np.sum(e_hl**2) + np.sum(h_hl**2)) * spec.cell_volume),
                "peak_rho_e_hl": dualmaxwell.charge_to_heaviside_lorentz(
                    float(np.max(np.abs(src.rho_e.at(final.t))))
                ),
                "peak_rho_m_hl": dualmaxwell.charge_to_heaviside_lorentz(
                    float(np.max(np.abs(src.rho_m.at(final.t))))
                ),
            }
        )

    # -----------------------------------------------------------------------
    # brackets

    def run_brackets(self, config, rng, result):
        spec = grid_from_config(config)
        tolerance = config["brackets.tolerance"]
        numeric = config["brackets.numeric"]
        count = config["brackets.states"]
        if count < 1:
            raise InvalidInputError(f"brackets.states must be at least 1, got {count!r}")
        if config["brackets.points"] < 1:
            raise InvalidInputError(f"brackets.points must be at least 1, got {config['brackets.points']!r}")
        points = brackets.default_sample_points(spec, config["brackets.points"])
        h_functional = brackets.hamiltonian_functional()
        if numeric:
            h_functional = h_functional.numeric()
        rows = []

        def add(check, state_index, point, residual, limit):
            passed = result.check(f"{check} state {state_index} at {point}", residual, limit)
            rows.append(
                {
                    "check": check,
                    "state": state_index,
                    "point": point,
                    "residual": residual,
                    "tolerance": limit,
                    "pass": passed,
                }
            )

        for index in range(count):
            state = brackets.random_smooth_state(spec, rng)
            scale = max(state.scale(), np.finfo(float).tiny)
            for point in points:
                label = _point_label(point)
                secondary = brackets.secondary_constraint_residual(state, point, numeric)
                closure = brackets.poisson_bracket(brackets.divergence_b(point), h_functional, state)
                add("secondary constraint", index, label, abs(secondary) / scale, tolerance)
                add("constraint closure", index, label, abs(closure) / scale, tolerance)
            if index == 0:
                self_bracket = brackets.poisson_bracket(h_functional, h_functional, state)
                add("[H,H]", index, "", abs(self_bracket) / scale**2, tolerance)

        state = brackets.random_smooth_state(spec, rng)
        m = len(points)
        pairs = [(points[i % m], points[i % m]) for i in range(3)]
        pairs += [(points[0], points[1 % m]), (points[3 % m], points[4 % m])]
        add(
            "canonical relations",
            count,
            ";".join(f"{_point_label(x)}|{_point_label(y)}" for x, y in pairs),
            brackets.canonical_relation_residual(state, pairs),
            CANONICAL_TOLERANCE,
        )
        wave = brackets.plane_wave_state(spec, amplitude=1.0, mode=config["brackets.modes"])
        closure = brackets.constraint_chain_closure(wave, points, numeric)
        add("plane-wave closure", count + 1, "", closure / max(wave.scale(), 1.0), tolerance)

        frame = pd.DataFrame(rows)
        result.add_table("brackets", frame)
        result.summary.update(
            {
                "states": count,
                "points": len(points),
                "numeric": numeric,
                "worst_residual": float(frame["residual"].max()),
            }
        )

    # -----------------------------------------------------------------------
    # fock

    def run_fock(self, config, rng, result):
        space = focksu2.TwoModeSpace(config["fock.n_max"])
        omega, hbar, k_b = config["fock.omega"], config["physics.hbar"], config["physics.k_b"]
        if omega <= 0:
            raise InvalidInputError(f"fock.omega must be positive, got {omega!r}")

        commutator_rows = []
        for name, residual in focksu2.commutator_table(space, omega, hbar):
            limit = 0.0 if name == "B11+B22" else COMMUTATOR_TOLERANCE
            commutator_rows.append(
                {
                    "check": name,
                    "residual": residual,
                    "tolerance": limit,
                    "pass": result.check(name, residual, limit),
                }
            )
        result.add_table("fock_commutators", pd.DataFrame(commutator_rows))

        casimir_rows = []
        for n in range(space.n_max + 1):
            value = focksu2.casimir_on_subspace(space, n)
            expected = (n / 2.0) * (n / 2.0 + 1.0)
            error = abs(value - expected)
            casimir_rows.append(
                {
                    "n": n,
                    "dimension": n + 1,
                    "casimir": value,
                    "expected": expected,
                    "error": error,
                    "pass": result.check(f"casimir n={n}", error, CASIMIR_EIGEN_TOLERANCE),
                }
            )
        result.add_table("fock_casimir", pd.DataFrame(casimir_rows))

        cutoff = config["fock.occupancy_cutoff"]
        occupancy_rows = []
        for temperature in config.floats("fock.temperatures"):
            ratio = hbar * omega / (k_b * temperature) if temperature > 0 else math.inf
            truncated = focksu2.planck_occupancy(omega, temperature, cutoff, hbar, k_b)
            closed = focksu2.planck_closed_form(ratio)
            bound = focksu2.planck_truncation_bound(ratio, cutoff)
            difference = abs(truncated - closed)
            limit = bound + 1e-12
            occupancy_rows.append(
                {
                    "temperature": temperature,
                    "ratio": ratio,
                    "truncated": truncated,
                    "closed_form": closed,
                    "difference": difference,
                    "bound": bound,
                    "pass": result.check(f"occupancy T={temperature}", difference, limit),
                }
            )
        result.add_table("fock_occupancy", pd.DataFrame(occupancy_rows))
        result.summary.update({"n_max": space.n_max, "dimension": space.dimension, "omega": omega})

    # -----------------------------------------------------------------------
    # clebsch

    def run_clebsch(self, config, rng, result):
        preset = config["clebsch.preset"]
        c = config["physics.c"]
        if config["clebsch.sweep"]:
            frame = clebsch.refinement_sweep(
                preset, config["clebsch.length"], config.floats("clebsch.spacings"), rng, c
            )
            result.add_table("clebsch_sweep", frame)
            low, high = ORDER_RATIO_RANGE
            centre, spread = 0.5 * (low + high), 0.5 * (high - low)
            for column in ("curl_order", "div_order"):
                for h, order in zip(frame["h"].iloc[1:], frame[column].iloc[1:]):
                    ratio = 2.0**order if np.isfinite(order) else math.inf
                    result.check(f"{column} h={h:g}", abs(ratio - centre), spread)
            result.summary["sweep"] = frame.to_dict(orient="list")
            return

        spec = grid_from_config(config)
        triple = clebsch.build_triple(preset, spec, rng)
        rows = [
            {"check": "curl identity", "residual": clebsch.curl_identity_residual(triple)},
            {"check": "div formula", "residual": clebsch.div_formula_residual(triple)},
        ]
        if preset == "harmonic":
            rows.append({"check": "harmonic divergence", "residual": clebsch.harmonic_divergence(triple)})
        dt = config["run.dt"]
        potentials = clebsch.smooth_potentials(spec, rng, dt)
        rv, rs, gauss = clebsch.manufactured_residuals(potentials, c)
        for name, value in (("manufactured vector", rv), ("manufactured scalar", rs), ("manufactured gauss", gauss)):
            rows.append({"check": name, "residual": value})
            result.check(name, value, 1e-10)

        # vacuum plane wave on the lattice dispersion relation: rho = j = 0
        wave = clebsch.plane_wave_potentials(spec, dt, omega=clebsch.lattice_frequency(spec, dt))
        zero_rho, zero_j = ScalarFieldGrid.zeros(spec), VectorFieldGrid.zeros(spec)
        rv, rs = clebsch.potential_source_residual(wave, zero_rho, zero_j, c)
        k_lattice = 2.0 * math.sin(math.pi * spec.h / spec.length) / spec.h
        rows.append({"check": "plane wave vector", "residual": rv / k_lattice**2})
        rows.append({"check": "plane wave scalar", "residual": rs})
        result.check("plane wave vector", rv / k_lattice**2, 1e-8)
        result.check("plane wave scalar", rs, 0.0)

        # static Coulomb potential from the lattice Poisson solve
        charge = random_smooth_scalar(spec, rng)
        coulomb, neutral = clebsch.coulomb_potentials(spec, charge, dt)
        rv, rs = clebsch.potential_source_residual(coulomb, neutral, zero_j, c)
        scale = clebsch.FOUR_PI * neutral.max_abs()
        rows.append({"check": "coulomb vector", "residual": rv})
        rows.append({"check": "coulomb scalar", "residual": rs / scale})
        result.check("coulomb vector", rv, 0.0)
        result.check("coulomb scalar", rs / scale, 1e-10)
        result.add_table("clebsch", pd.DataFrame(rows))

        invariants = []
        for source, p in (("smooth", potentials), ("plane wave", wave)):
            s, pseudo = clebsch.field_invariants(*clebsch.potential_fields(p, c))
            invariants.append({"potentials": source, "quantity": "E2-H2", "value": s})
            invariants.append({"potentials": source, "quantity": "E.H", "value": pseudo})
        result.add_table("clebsch_invariants", pd.DataFrame(invariants))
        result.summary.update({"preset": preset, "h": spec.h, "n": spec.n})

    # -----------------------------------------------------------------------
    # diag

    def run_diag(self, config, rng, result):
        charges = config.floats("diag.charges")
        count = config["diag.points"]
        step = config["diag.step"]
        if count < 1:
            raise InvalidInputError(f"diag.points must be at least 1, got {count!r}")
        points = np.column_stack(
            [
                rng.uniform(0.5, 5.0, count),
                rng.uniform(0.1, np.pi - 0.1, count),
                rng.uniform(0.0, 2.0 * np.pi, count),
            ]
        )
        spherical_rows = []
        falloff_rows = []
        radii = np.geomspace(0.5, 8.0, 9)
        for charge in charges:
            if charge == 0:
                raise InvalidInputError("diag.charges must be non-zero")
            samples = SphericalSamples(points, lambda r, theta, phi, q=charge: q / r**2)
            for (r, theta, phi), value in zip(points, spherical_divergence(samples, step)):
                spherical_rows.append(
                    {"charge": charge, "r": r, "theta": theta, "phi": phi, "divergence": value}
                )
                result.check(f"spherical divergence C={charge:g}", abs(value), SPHERICAL_TOLERANCE)
            exponent, amplitude = radial_falloff_fit(np.column_stack([radii, abs(charge) / radii**2]))
            falloff_rows.append(
                {
                    "charge": charge,
                    "exponent": exponent,
                    "amplitude": amplitude,
                    "exponent_error": abs(exponent + 2.0),
                }
            )
            result.check(f"falloff exponent C={charge:g}", abs(exponent + 2.0), 1e-12)
        result.add_table("diag_spherical", pd.DataFrame(spherical_rows))
        result.add_table("diag_falloff", pd.DataFrame(falloff_rows))

        spec = grid_from_config(config)
        f = random_smooth_vector(spec, rng)
        s = random_smooth_scalar(spec, rng)
        transverse, longitudinal, dc = helmholtz_split(f)
        rebuilt = transverse.values + longitudinal.values + dc.reshape(3, 1, 1, 1)
        grid_rows = [
            {"check": "helmholtz reconstruction", "value": relative_error(rebuilt, f.values)},
            {"check": "transverse divergence", "value": spectral_divergence_norm(transverse)},
            {"check": "div curl", "value": divergence(curl(f)).max_abs()},
            {"check": "curl grad", "value": curl(gradient(s)).max_abs()},
        ]
        result.add_table("diag_grid", pd.DataFrame(grid_rows))
        result.summary.update({"charges": charges, "points": count, "step": step})


scenario_engine = ScenarioEngine()
