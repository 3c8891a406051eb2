"""Pipeline service: runs the analysis stages on one example and collects a report."""
import logging
import time
from itertools import chain, combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from sphkit.catalog import ExampleEntry, ExampleRegistry
from sphkit.charts import SL2Chart
from sphkit.cones import orthant_fan, projective_fan, simplicial_subdivision
from sphkit.config import ToolkitSettings, settings as default_settings
from sphkit.cterm import (
    ZERO,
    StagedComponent,
    StagedExample,
    constant_term,
    constant_term_ray,
    discrete_series_test,
    integrality_check,
    joint_spectrum,
    projector_bound_check,
    projector_growth_check,
    random_spectral_matrix,
    random_transport_system,
    solve_transport,
    synthetic_staged_system,
    transitivity_check,
)
from sphkit.degen import (
    degenerate_further,
    degeneration_consistency,
    grading_by,
    h_I_explicit,
    numeric_limit_check,
    verify_degenerate_space,
)
from sphkit.envalg import (
    aS_centrality_check,
    b_order,
    casimir,
    hc_order,
    hc_projection_gamma0,
    in_zero_weight_part,
    invariant_subspace_basis,
    is_central,
    mu_multiplicative,
    square_casimir,
)
from sphkit.errors import StageError, ToolkitError
from sphkit.expfit import approximation_rate
from sphkit.hyperbolic import hyperbolic_transport, radial_casimir
from sphkit.models import RunReport, StageResult
from sphkit.oracles import eigen_residual, leading_term, spherical_function_oracle
from sphkit.rapidfit import fit_rate, orbit_asymptotics, synthetic_family, toric_family
from sphkit.sphstruct import SphericalDatum, analyze, lattice_check, roots_invariance

LOG = logging.getLogger(__name__)

STAGES = ("analyze", "degenerate", "fan", "envalg", "cterm", "rapid", "verify")
DEPENDS: Dict[str, Tuple[str, ...]] = {
    "degenerate": ("analyze",),
    "fan": ("analyze",),
    "envalg": ("analyze",),
    "rapid": ("analyze",),
}

FAN_SAMPLES = 100_000
CONSISTENCY_SAMPLES = 5
PROJECTOR_ENSEMBLE = 1000
TRANSPORT_ENSEMBLE = 100
RAY_DIRECTION = -0.5
REMAINDER_EXPONENT = 2.0


def parse_stages(stages: Union[None, str, Sequence[str]]) -> List[str]:
    """Requested stages plus their prerequisites, in pipeline order."""
    if stages is None or stages == "all":
        return list(STAGES)
    names = [s.strip() for s in stages.split(",")] if isinstance(stages, str) else list(stages)
    names = [s for s in names if s]
    unknown = [s for s in names if s not in STAGES]
    if unknown:
        raise ValueError(f"Unknown stages: {', '.join(unknown)}")
    wanted = set(names)
    for name in names:
        wanted.update(DEPENDS.get(name, ()))
    return [s for s in STAGES if s in wanted]


def index_sets(count: int) -> List[Tuple[int, ...]]:
    """All subsets of range(count), smallest first."""
    return list(chain.from_iterable(combinations(range(count), k) for k in range(count + 1)))


def _coords(datum: SphericalDatum) -> List[Tuple[str, ...]]:
    return sorted(tuple(str(c) for c in r.coords) for r in datum.spherical_roots)


def _generic_direction(cone) -> Tuple:
    """Weighted sum of rays, pushed off the lineality space, so no chart coordinate is constant."""
    total = [sp.Integer(0)] * cone.ambient_dim
    for k, ray in enumerate(cone.rays):
        total = [t + (k + 1) * a for t, a in zip(total, ray)]
    for k, b in enumerate(cone.lineality_basis):
        total = [t - (k + 1) * a for t, a in zip(total, b)]
    return tuple(total)


class PipelineService:
    """Runs stages on built-in or file-supplied examples."""

    def __init__(self, settings: Optional[ToolkitSettings] = None, registry: Optional[ExampleRegistry] = None):
        self.settings = settings or default_settings
        self.registry = registry or ExampleRegistry()
        self._handlers: Dict[str, Callable[[ExampleEntry, StageResult], None]] = {
            "analyze": self._analyze,
            "degenerate": self._degenerate,
            "fan": self._fan,
            "envalg": self._envalg,
            "cterm": self._cterm,
            "rapid": self._rapid,
            "verify": self._verify,
        }
        self._datum: Optional[SphericalDatum] = None

    def resolve(self, example: Optional[str] = None, input_path: Optional[Union[str, Path]] = None) -> ExampleEntry:
        if (example is None) == (input_path is None):
            raise ValueError("Exactly one of example or input file is required")
        if input_path is not None:
            return ExampleRegistry.from_file(input_path)
        return self.registry.get_by_name(example)

    def run(
        self,
        example: Optional[str] = None,
        input_path: Optional[Union[str, Path]] = None,
        stages: Union[None, str, Sequence[str]] = None,
        strict: bool = False,
    ) -> RunReport:
        """Run the requested stages in order; a failed stage skips the stages that depend on it."""
        entry = self.resolve(example, input_path)
        names = parse_stages(stages)
        report = RunReport(
            example=entry.name,
            seed=self.settings.seed,
            settings=self.settings.model_dump(mode="json", exclude={"out_dir", "log_level", "log_json"}),
        )
        self._datum = None
        failed: set = set()
        for name in names:
            result = StageResult(stage=name)
            missing = [d for d in DEPENDS.get(name, ()) if d in failed]
            if missing:
                result.error = f"skipped: {', '.join(missing)} failed"
                failed.add(name)
                report.stages.append(result)
                continue
            started = time.perf_counter()
            try:
                self._handlers[name](entry, result)
            except ValueError as exc:
                cause = exc if isinstance(exc, ToolkitError) else ToolkitError(str(exc))
                result.error = f"{type(exc).__name__}: {exc}"
                failed.add(name)
                LOG.error("stage failed", extra={"stage": name, "example": entry.name, "error": result.error})
                if strict:
                    raise StageError(name, cause) from exc
            result.seconds = time.perf_counter() - started
            LOG.info(
                "stage finished",
                extra={"stage": name, "example": entry.name, "passed": result.passed, "seconds": result.seconds},
            )
            report.stages.append(result)
        return report

    # -- stages ---------------------------------------------------------------

    def _require_datum(self) -> SphericalDatum:
        if self._datum is None:
            raise ValueError("the analyze stage has not produced a datum")
        return self._datum

    def _analyze(self, entry: ExampleEntry, result: StageResult) -> None:
        g, h, parabolic = entry.build()
        datum = analyze(g, h, parabolic, search_cap=self.settings.search_cap)
        self._datum = datum
        for name, ok in datum.check_decomposition().items():
            result.add(f"decomposition.{name}", ok, "check_decomposition")
        if entry.spherical_roots is not None:
            found = _coords(datum)
            result.add(
                "spherical_roots",
                found == sorted(entry.spherical_roots),
                "spherical_roots",
                value=[list(r) for r in found],
            )
        if entry.rho is not None:
            rho = tuple(str(datum.rho.rho(r)) for r in datum.a_Z.rows)
            result.add("rho_Q", rho == tuple(entry.rho), "rho_q_and_unimodularity", value=list(rho))
        result.add("rho_Q.vanishes_on_a_H", datum.rho.vanishes_on_aH, "rho_q_and_unimodularity")
        invariant = roots_invariance(g, h, parabolic, datum, self.settings.search_cap)
        result.add("roots_invariance", invariant is not False, "roots_invariance", value=invariant)
        lattice = lattice_check(datum.roots, datum.edge)
        result.data.update(
            {
                "datum": datum.to_document().model_dump(mode="json"),
                "unimodular": datum.rho.unimodular,
                "lattice": {
                    "independent": lattice.independent,
                    "basis_of_lattice": lattice.basis_of_lattice,
                    "wonderful": lattice.wonderful,
                },
            }
        )

    def _degenerate(self, entry: ExampleEntry, result: StageResult) -> None:
        datum = self._require_datum()
        rng = self.settings.rng()
        subsets = index_sets(len(datum.spherical_roots))
        degenerations = {}
        for index in subsets:
            tag = "I=" + ",".join(map(str, index)) if index else "I=()"
            degenerate = h_I_explicit(datum, index)
            degenerations[tag] = degenerate.h_I.to_strings()
            for name, ok in degenerate.checks.items():
                result.add(f"{tag}.{name}", ok, "h_I_explicit")
            samples = datum.face(index).interior_samples(CONSISTENCY_SAMPLES, rng)
            consistency = degeneration_consistency(datum, index, samples)
            result.add(
                f"{tag}.limit_agrees", consistency.passed, "degeneration_consistency", value=len(consistency.samples)
            )
            for name, ok in verify_degenerate_space(datum, index).items():
                result.add(f"{tag}.degenerate_space.{name}", ok, "verify_degenerate_space")
            if not index and samples and datum.h.dim:
                x = datum.lift(samples[0])
                angle = numeric_limit_check(datum.g, datum.h, grading_by(datum, x), degenerate.h_I, t=50.0)
                result.add(f"{tag}.numeric_limit", angle <= 1e-6, "numeric_limit_check", value=angle, tolerance=1e-6)
        if entry.h_empty is not None:
            expected = datum.g.span_labels(*entry.h_empty)
            result.add("h_empty", h_I_explicit(datum, ()).h_I == expected, "h_I_explicit")
        for outer in subsets:
            for inner in subsets:
                if set(inner) < set(outer):
                    checks = degenerate_further(datum, outer, inner)
                    result.add(f"transitive.{outer}->{inner}", checks["transitive"], "degenerate_further")
        result.data["h_I"] = degenerations

    def _fan(self, entry: ExampleEntry, result: StageResult) -> None:
        datum = self._require_datum()
        rng = self.settings.rng()
        if datum.a_Z.dim == 0:
            result.data["fan"] = None
            return
        fan = simplicial_subdivision(datum.compression_cone)
        certificate = fan.certify(samples=FAN_SAMPLES, rng=rng)
        result.add("compression_fan", certificate.passed, "Fan.certify", value=list(certificate.violations))
        result.data["fan"] = fan.to_document().model_dump(mode="json")
        result.data["closed_orbits"] = fan.closed_orbit_count
        for name, complete in (
            ("orthant_2", orthant_fan(2)),
            ("projective_2", projective_fan(2)),
            ("orthant_3", orthant_fan(3)),
            ("projective_3", projective_fan(3)),
        ):
            result.add(name, complete.certify(samples=FAN_SAMPLES, rng=rng).passed, "Fan.certify")
            result.data[f"{name}_closed_orbits"] = complete.closed_orbit_count

    def _envalg(self, entry: ExampleEntry, result: StageResult) -> None:
        datum = self._require_datum()
        cap = self.settings.degree_cap
        rng = self.settings.rng()
        omega = casimir(datum.g, cap)
        result.add("casimir_central", is_central(omega), "is_central")
        if datum.parabolic.n.dim:
            order = hc_order(datum.parabolic, cap=cap)
            gamma = hc_projection_gamma0(omega, datum.parabolic)
            result.add("gamma0_zero_weight", in_zero_weight_part(gamma, order), "hc_projection_gamma0")
            result.data["gamma0"] = repr(gamma)
            if datum.g.name == "sl2":
                algebra = gamma.algebra
                h = algebra.gen(algebra.labels.index("H"))
                expected = h * h * sp.Rational(1, 2) - h
                result.add("gamma0_value", gamma == expected, "hc_projection_gamma0", value=repr(gamma))
        b = b_order(datum, cap)
        centrality = aS_centrality_check(b, degree=2)
        result.add("aS_central", bool(centrality["passed"]), "aS_centrality_check", value=int(centrality["checked"]))
        elements = invariant_subspace_basis(b, datum.h, 2)
        for index in index_sets(len(datum.spherical_roots)):
            tag = "I=" + ",".join(map(str, index)) if index else "I=()"
            x = datum.face(index).interior_samples(1, rng)[0]
            h_I = h_I_explicit(datum, index).h_I
            result.add(f"{tag}.square_casimir", square_casimir(b, index, x, h_I), "square_casimir")
            for name, ok in mu_multiplicative(b, index, x, elements).items():
                result.add(f"{tag}.mu_{name}", ok, "mu_multiplicative")

    def _cterm(self, entry: ExampleEntry, result: StageResult) -> None:
        if not entry.eigenfunction:
            result.data["skipped"] = "no eigenfunction oracle"
            return
        tol = self.settings.tol
        radial = radial_casimir(self.settings.degree_cap)
        result.data["radial_casimir"] = [radial.a2, radial.a1, radial.a0]
        x = np.array([RAY_DIRECTION])
        for lam in entry.parameters:
            tag = f"lambda={lam:g}"
            system, base = hyperbolic_transport(lam, cap=self.settings.degree_cap)
            spectral = joint_spectrum(system, self.settings.cluster_tol, tol)
            result.add(f"{tag}.projectors", spectral.invariants_hold, "joint_spectrum", value=spectral.checks)
            result.add(f"{tag}.unitary_channels", len(spectral.of_class(ZERO)) == 2, "joint_spectrum")
            model = constant_term_ray(system, spectral, base, x, tol)
            frequencies = sorted(s.imag for s in model.exponents)
            result.add(
                f"{tag}.frequencies",
                len(frequencies) == 2 and max(abs(abs(f) - lam) for f in frequencies) <= 1e-3,
                "constant_term_ray",
                value=frequencies,
                tolerance=1e-3,
            )
            rho_x = float(system.rho @ x)
            result.add(
                f"{tag}.unitary_on_ray",
                all(abs(s.real - rho_x) <= 1e-6 for s in model.exponents),
                "constant_term_ray",
                value=[s.real for s in model.exponents],
                tolerance=1e-6,
            )
            r0 = -2.0 * float(base[0])
            t = np.linspace(0.0, 6.0, 121)
            radii = r0 + t
            f = spherical_function_oracle(lam, radii)
            f_I = np.real(model(t))
            gap = float(np.max(np.abs(f_I - leading_term(lam, radii))))
            result.add(f"{tag}.leading_term", gap <= 1e-6, "constant_term_ray", value=gap, tolerance=1e-6)
            rate = approximation_rate(t, f, model, rho_x, predicted=REMAINDER_EXPONENT)
            result.add(
                f"{tag}.approximation_rate",
                bool(rate.matches_prediction),
                "approximation_rate",
                value=rate.epsilon,
                tolerance=0.1,
            )
            residual = eigen_residual(lam, r0 + 1.0)
            result.add(f"{tag}.eigen_residual", residual <= 1e-6, "eigen_residual", value=residual, tolerance=1e-6)
            result.series[tag] = {
                "t": t.tolist(),
                "value": f.tolist(),
                "constant_term": f_I.tolist(),
                "remainder": (f - f_I).tolist(),
            }

    def _rapid(self, entry: ExampleEntry, result: StageResult) -> None:
        datum = self._require_datum()
        grid = np.linspace(1.0, 20.0, 77)
        if entry.chart is not None and entry.orbit_point is not None:
            report = orbit_asymptotics(SL2Chart(entry.chart), entry.orbit_point, RAY_DIRECTION, grid)
            for name, rate in report.families.items():
                result.add(f"orbit.{name}", rate.is_rapid, "orbit_asymptotics", value=rate.epsilon)
            result.data["orbit_limits"] = report.limits
        if datum.a_Z.dim:
            fan = simplicial_subdivision(datum.compression_cone)
            x = _generic_direction(datum.compression_cone)
            cone = fan.cone_containing(x)
            limit = fan.toric_limit(x)
            if cone is not None and limit.rate is not None:
                family = toric_family(x, fan.chart(cone), np.linspace(0.0, 20.0, 81))
                fitted = fit_rate(family)
                result.add(
                    "toric_rate",
                    abs(fitted.epsilon - limit.rate) <= 0.01 * limit.rate,
                    "fit_rate",
                    value=[fitted.epsilon, limit.rate],
                    tolerance=0.01,
                )
                result.series["toric"] = family.to_frame().to_dict(orient="list")
        exponential = fit_rate(synthetic_family(grid, 0.7))
        result.add("synthetic_exponential", exponential.is_rapid, "fit_rate", value=exponential.epsilon)
        polynomial = fit_rate(synthetic_family(grid, 0.7, kind="poly"))
        result.add("synthetic_polynomial_rejected", not polynomial.is_rapid, "fit_rate", value=polynomial.epsilon)

    def _verify(self, entry: ExampleEntry, result: StageResult) -> None:
        tol = self.settings.tol
        rng = self.settings.rng()
        staged = StagedExample()
        bases = [np.array([-1.0, -1.0]), np.array([-0.5, -2.0])]

        full = synthetic_staged_system(())
        for base in bases:
            for s in (0.5, 2.0):
                direction = np.array([-1.0, -0.5])
                value = solve_transport(full, base, direction, s)
                expected = full.phi(full.point(base, direction, s))
                error = float(np.linalg.norm(value - expected) / max(1.0, np.linalg.norm(expected)))
                result.add("transport_closed_form", error <= tol, "solve_transport", value=error, tolerance=tol)

        worst_transport = 0.0
        for _ in range(TRANSPORT_ENSEMBLE):
            drawn = random_transport_system(rng)
            x = np.array([-float(rng.uniform(0.25, 1.5))])
            base = np.array([float(rng.uniform(-1.0, 1.0))])
            s = float(rng.uniform(0.5, 2.0))
            exact = drawn.closed_form(base, x, s)
            value = solve_transport(drawn.system, base, x, s, check=False)
            worst_transport = max(worst_transport, float(np.linalg.norm(value - exact) / max(1.0, np.linalg.norm(exact))))
        result.add("transport_ensemble", worst_transport <= tol, "solve_transport", value=worst_transport, tolerance=tol)

        for index in ((), (0,), (1,)):
            system = synthetic_staged_system(index)
            spectral = joint_spectrum(system, self.settings.cluster_tol, tol)
            worst = max(abs(constant_term(system, spectral, b) - staged.ground_truth(index, b)) for b in bases)
            result.add(f"staged_constant_term.{index}", worst <= tol, "constant_term", value=worst, tolerance=tol)

        transitivity = transitivity_check(
            synthetic_staged_system((0,)), synthetic_staged_system((), source=(0,)), synthetic_staged_system(()), bases, tol
        )
        result.add("transitivity", transitivity.passed, "transitivity_check", value=transitivity.max_error, tolerance=tol)

        rho = staged.rho
        decaying = StagedExample(
            components=[
                StagedComponent(1.0, rho + np.array([1.0 + 0.4j, 1.0])),
                StagedComponent(0.5, rho + np.array([2.0, 1.0 + 0.2j])),
            ]
        )
        systems = {index: decaying.system(index) for index in ((), (0,), (1,))}
        vanishing = discrete_series_test(systems, bases, 1e-6)
        result.add("decaying_is_discrete", vanishing.passed, "discrete_series_test", tolerance=1e-6)
        if entry.eigenfunction and entry.parameters:
            system, base = hyperbolic_transport(entry.parameters[0], cap=self.settings.degree_cap)
            spherical = discrete_series_test({(): system}, [base], 1e-6)
            result.add("spherical_is_not_discrete", not spherical.passed, "discrete_series_test", tolerance=1e-6)

        integrality = integrality_check(joint_spectrum(full), staged.rho, np.eye(2))
        result.add("integrality", integrality.passed, "integrality_check", value=list(integrality.distances))

        growth = projector_growth_check(full, joint_spectrum(full), [(-1.0, -1.0), (-1.0, -3.0)], [0.0, 1.0, 5.0, 25.0])
        result.add("projector_growth", growth.passed, "projector_growth_check", value=growth.max_ratio)

        failures = 0
        for _ in range(PROJECTOR_ENSEMBLE):
            if not projector_bound_check(random_spectral_matrix(rng), min_gap=self.settings.projector_gap).passed:
                failures += 1
        result.add("projector_bound_ensemble", failures == 0, "projector_bound_check", value=failures)
