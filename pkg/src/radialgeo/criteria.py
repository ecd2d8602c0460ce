"""Decision procedures tying curvature envelopes to volume growth.

A check takes the model curvature bounds and a volume-growth numerator
(either a synthetic instance whose growth is computed here, or an externally
asserted bracket), derives the critical angle and the growth threshold from
the nonpositive curvature envelope, evaluates the two hypotheses, and emits a
CriterionReport. Verdicts are one-directional: the checker certifies the
conclusion when the hypotheses hold and otherwise reports Inconclusive; it
never claims the converse.

Verdict strings, tri-state values, and the report's JSON field order are wire
format shared with the command-line front end; do not reword them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import (
    RadialCurvature,
    moment_integral,
    nonpositive_min,
    nonpositive_part,
)
from .errors import DomainError, HorizonExceededError
from .synthetic import RotSymManifold
from .volume import _assemble_ratio, cap_fraction, classify_ball_volume, growth_ratio
from .warping import DEFAULT_REL_TOL, solve_warping

DEFAULT_HORIZONS = (2.0, 4.0, 8.0, 16.0)
# comparison grace for bracket-vs-threshold decisions
_B2_EPS = 1e-9
# domination spot checks must out-tolerance the curvature extraction paths:
# profile differentiation is good to 1e-6 sup, the values-only route to 1e-4
_DOMINATION_TOL_EXACT = 5e-6
_DOMINATION_TOL_PROFILE = 5e-4

VERDICT_DIFFEO = "DiffeoRn"
VERDICT_INCONCLUSIVE = "Inconclusive"
VERDICT_RIGIDITY = "DegenerateRigidity"
B2_HOLDS = "Holds"
B2_FAILS = "Fails"
B2_INCONCLUSIVE = "Inconclusive"


def critical_angle(envelope: RadialCurvature) -> float:
    """(pi/2) * exp of the first curvature moment: directions within this
    angle of a ray cannot be critical for the distance function. Returns 0
    when the moment diverges (the bound degenerates)."""
    mom = moment_integral(envelope)
    if mom.divergent:
        return 0.0
    return (math.pi / 2.0) * math.exp(mom.value)


def growth_threshold(n: int, delta: float) -> float:
    """Volume-growth fraction 1 - F(delta) that forces every direction to be
    a ray once the growth limit reaches it."""
    return 1.0 - cap_fraction(n, delta)


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of a pinching check.

    growth_limit is a bracket [lo, hi]; b2_holds is tri-state because a
    bracket straddling the threshold supports no claim in either direction.
    diagnostics carries flags (machine-readable) and notes (human-readable),
    both deterministic for a given input.
    """

    n: int
    delta: float
    threshold: float
    growth_limit: tuple
    b1_holds: bool
    b2_holds: str
    verdict: str
    diagnostics: dict

    def to_json(self) -> dict:
        # field order is stable for diffing; keep in sync with the docstring
        return {
            "n": self.n,
            "delta": self.delta,
            "threshold": self.threshold,
            "growth_limit": [float(self.growth_limit[0]), float(self.growth_limit[1])],
            "b1_holds": self.b1_holds,
            "b2_holds": self.b2_holds,
            "verdict": self.verdict,
            "diagnostics": self.diagnostics,
        }


def _checked_horizons(horizons) -> tuple:
    hs = tuple(sorted(float(h) for h in horizons))
    if not hs:
        raise DomainError("at least one growth horizon is required")
    if hs[0] <= 0 or not all(math.isfinite(h) for h in hs):
        raise DomainError(f"growth horizons must be positive and finite, got {hs}")
    return hs


def _tri_state(growth_limit, threshold: float) -> str:
    lo, hi = growth_limit
    if lo >= threshold - _B2_EPS:
        return B2_HOLDS
    if hi < threshold - _B2_EPS:
        return B2_FAILS
    return B2_INCONCLUSIVE


def _growth_bracket(n, numerator, model_curvature, b1, horizons, rel_tol,
                    bound_checks):
    """Resolve the numerator into a growth bracket.

    Synthetic numerators get their declared domination spot-checked on a
    grid, then the ratio sequence is computed against the model; asserted
    brackets pass through untouched. Returns (bracket, ratio_or_None, notes).
    """
    notes = []
    if isinstance(numerator, (tuple, list)):
        if len(numerator) != 2:
            raise DomainError("a declared growth bracket needs exactly [lo, hi]")
        lo, hi = float(numerator[0]), float(numerator[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 <= lo <= hi):
            raise DomainError(f"invalid growth bracket [{lo!r}, {hi!r}]")
        notes.append("growth bracket asserted by caller; domination not verified here")
        return (lo, hi), None, notes
    if not isinstance(numerator, RotSymManifold):
        raise DomainError(
            "numerator must be a RotSymManifold or a declared [lo, hi] bracket")
    if numerator.dimension != n:
        raise DomainError(
            f"numerator dimension {numerator.dimension} does not match n = {n}")

    max_h = horizons[-1]
    mfd = numerator
    if mfd.t_max < max_h * (1.0 - 1e-12):
        if mfd.profile_derived:
            raise HorizonExceededError(
                f"profile-derived numerator reaches only t = {mfd.t_max:.6g} "
                f"but growth horizons need {max_h:.6g}")
        mfd = RotSymManifold.from_curvature(n, mfd.curvature, t_max=max_h,
                                            rel_tol=rel_tol)

    tol = _DOMINATION_TOL_PROFILE if mfd.profile_derived else _DOMINATION_TOL_EXACT
    grid = np.linspace(0.0, max_h, 641)
    for bound, accessor, label in bound_checks:
        vals = np.asarray(getattr(mfd, accessor)(grid))
        bound_vals = np.asarray(bound(grid))
        bad = np.nonzero(vals + tol < bound_vals)[0]
        if bad.size:
            i = int(bad[0])
            raise DomainError(
                f"declared domination fails near t = {grid[i]:.6g}: "
                f"{label} {vals[i]:.6g} < model curvature {bound_vals[i]:.6g}")
    notes.append("curvature domination verified on the synthetic numerator")
    if mfd.profile_derived:
        notes.append("numerator curvature reconstructed from profile data "
                     "(reduced accuracy)")

    den_warping = solve_warping(model_curvature, max_h, rel_tol)
    if b1:
        ratio = growth_ratio(n, mfd.warping, den_warping, horizons, dominated=True)
    else:
        # bounded denominator: the ratio is still well defined pointwise,
        # only its reading as a growth limit is
        ratio = _assemble_ratio(n, mfd.warping, den_warping, list(horizons), True)
    if not ratio.monotone_nonincreasing:
        t0, r0, t1, r1 = ratio.first_violation
        notes.append(f"ratio sequence not monotone: {r0!r} at t = {t0!r} "
                     f"then {r1!r} at t = {t1!r}")
    for t, _vn, _vd, r in ratio.samples:
        notes.append(f"growth ratio at t = {t!r}: {r!r}")
    return ratio.bracket(), ratio, notes


def ricci_pinch_check(n: int, ricci_bound: RadialCurvature,
                      sectional_bound: RadialCurvature, numerator,
                      horizons=DEFAULT_HORIZONS,
                      rel_tol: float = DEFAULT_REL_TOL) -> CriterionReport:
    """Full two-hypothesis check against a radial-Ricci model bound.

    ricci_bound generates the comparison model (volume denominators and the
    divergence hypothesis); sectional_bound joins it in the nonpositive
    envelope that sets the critical angle. The numerator manifold must
    dominate both bounds; declared brackets skip that verification.
    """
    horizons = _checked_horizons(horizons)
    envelope = nonpositive_min(ricci_bound, sectional_bound)
    delta = critical_angle(envelope)
    threshold = growth_threshold(n, delta)

    classification = classify_ball_volume(n, ricci_bound, rel_tol=rel_tol)
    b1 = classification.kind == "divergent"
    notes = [f"model ball volumes {classification.kind}: {classification.note}"]
    flags = []

    growth_limit, _ratio, more = _growth_bracket(
        n, numerator, ricci_bound, b1, horizons, rel_tol,
        bound_checks=[
            (ricci_bound, "radial_ricci", "radial Ricci"),
            (sectional_bound, "radial_sectional", "radial sectional"),
        ])
    notes.extend(more)

    b2 = _tri_state(growth_limit, threshold)
    if b1 and b2 == B2_HOLDS:
        verdict = VERDICT_RIGIDITY if delta == 0.0 else VERDICT_DIFFEO
    else:
        verdict = VERDICT_INCONCLUSIVE
        if not b1:
            notes.append("hypothesis B-1 fails: model ball volumes stay bounded")

    return CriterionReport(n=n, delta=delta, threshold=threshold,
                           growth_limit=growth_limit, b1_holds=b1, b2_holds=b2,
                           verdict=verdict,
                           diagnostics={"flags": flags, "notes": notes})


def sectional_pinch_check(n: int, sectional_bound: RadialCurvature, numerator,
                          horizons=DEFAULT_HORIZONS,
                          rel_tol: float = DEFAULT_REL_TOL) -> CriterionReport:
    """Variant needing only a radial-sectional model bound.

    The envelope is the nonpositive part of that single bound. When the
    comparison model's total volume is finite the conclusion holds without
    the growth hypothesis at all; the report then carries the
    FiniteModelVolume flag and b1_holds stays False.
    """
    horizons = _checked_horizons(horizons)
    envelope = nonpositive_part(sectional_bound)
    delta = critical_angle(envelope)
    threshold = growth_threshold(n, delta)

    classification = classify_ball_volume(n, sectional_bound, rel_tol=rel_tol)
    b1 = classification.kind == "divergent"
    notes = [f"model ball volumes {classification.kind}: {classification.note}"]
    flags = []

    growth_limit, _ratio, more = _growth_bracket(
        n, numerator, sectional_bound, b1, horizons, rel_tol,
        bound_checks=[(sectional_bound, "radial_sectional", "radial sectional")])
    notes.extend(more)

    b2 = _tri_state(growth_limit, threshold)
    if not b1:
        flags.append("FiniteModelVolume")
        notes.append(f"total model volume {classification.total!r}; the "
                     "finite-volume branch certifies the conclusion directly")
        verdict = VERDICT_DIFFEO
    elif b2 == B2_HOLDS:
        verdict = VERDICT_RIGIDITY if delta == 0.0 else VERDICT_DIFFEO
    else:
        verdict = VERDICT_INCONCLUSIVE

    return CriterionReport(n=n, delta=delta, threshold=threshold,
                           growth_limit=growth_limit, b1_holds=b1, b2_holds=b2,
                           verdict=verdict,
                           diagnostics={"flags": flags, "notes": notes})
