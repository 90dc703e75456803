"""Vector-field calculus on charts: brackets, derived flags, named systems.

Fields evaluate on plain floats, on dual numbers (exact Jacobians for single
brackets), and on jets (truncated Taylor expansions, used by the derived-flag
computation where brackets nest deeply).  All the named distributions here
are rank 2: unicycle-with-trailers, car (steer/drive), the bracket normal
form with unit growth, and the jet-space tangency distribution.
"""

from dataclasses import dataclass, field

import numpy as np

from nonholo.errors import DimensionMismatch, SteeringOutOfRange
from nonholo.numkit import Jet, jet_variables, numerical_rank
from nonholo.numkit.dual import Dual, cos, generic_jacobian, sin, tan
from nonholo.numkit.rank import DEFAULT_RANK_TOL


def scalar_value(x):
    """Float value of a scalar that may be a Dual or a Jet."""
    while True:
        if isinstance(x, Dual):
            x = x.val
        elif isinstance(x, Jet):
            x = x.value
        else:
            return float(x)


@dataclass
class VectorField:
    """Smooth map on a chart, evaluable on floats, duals, and jets."""

    dim: int
    func: callable
    label: str = ""

    def __call__(self, point):
        if len(point) != self.dim:
            raise DimensionMismatch(f"{self.label or 'field'} expects dim {self.dim}")
        return self.func(point)

    def at(self, point):
        """Plain float evaluation as a numpy vector."""
        return np.array([scalar_value(c) for c in self(list(point))], dtype=float)


@dataclass
class Distribution:
    """Span of a list of generator fields on a common chart."""

    generators: list

    def __post_init__(self):
        if not self.generators:
            raise ValueError("distribution needs at least one generator")
        dims = {g.dim for g in self.generators}
        if len(dims) != 1:
            raise DimensionMismatch("generators live on different charts")

    @property
    def dim(self):
        return self.generators[0].dim


@dataclass
class FlagReport:
    point: list
    dims: list
    goursat: bool
    depth_used: int
    tol: float

    def as_dict(self):
        return {
            "point": [float(x) for x in self.point],
            "dims": list(self.dims),
            "goursat": self.goursat,
            "depth_used": self.depth_used,
            "tol": self.tol,
        }


def lie_bracket(V, W):
    """[V, W] with eval (DW)V - (DV)W; Jacobians are exact (dual numbers)."""
    if V.dim != W.dim:
        raise DimensionMismatch("bracket of fields on different charts")
    n = V.dim

    def ev(p):
        vp = V(list(p))
        wp = W(list(p))
        dv = generic_jacobian(lambda q: V(q), list(p))
        dw = generic_jacobian(lambda q: W(q), list(p))
        return [
            sum(dw[i][j] * vp[j] - dv[i][j] * wp[j] for j in range(n)) for i in range(n)
        ]

    return VectorField(n, ev, f"[{V.label or 'V'},{W.label or 'W'}]")


# ---------------------------------------------------------------------------
# jet-side machinery for derived flags


def _as_jet(c, nvars, deg):
    return c if isinstance(c, Jet) else Jet.constant(c, nvars, deg)


def field_jet(V, point, deg):
    """Taylor expansion of V at point through total degree deg."""
    out = V(jet_variables([float(x) for x in point], deg))
    return [_as_jet(c, V.dim, deg) for c in out]


def jet_bracket(vj, wj):
    """Bracket of two jet vector fields (exact polynomial algebra)."""
    n = len(vj)
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            term = vj[j] * wj[i].diff(j) - wj[j] * vj[i].diff(j)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def derived_flag(dist, point, max_depth=None, tol=DEFAULT_RANK_TOL):
    """Pointwise dimensions of D, D + [D,D], ... at ``point``.

    Generators and their accumulated brackets are kept as jets, so the
    bracket algebra is exact polynomial arithmetic.  Before each level the
    accumulated list is reduced to a pointwise frame (deterministic greedy
    selection in creation order), which spans the same sheaf near a generic
    point, and only frame pairs are bracketed.  Stops early once the chart
    dimension is reached or the dimensions stagnate.
    """
    n = dist.dim
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    point = [float(x) for x in point]

    dims0 = numerical_rank([g.at(point) for g in dist.generators], tol)
    budget = n - dims0 if max_depth is None else min(max_depth, n)
    limit = n if max_depth is None else max_depth

    jets = [field_jet(g, point, budget) for g in dist.generators]
    values = [np.array([c.value for c in jf]) for jf in jets]
    dims = [dims0]
    depth = 0

    while depth < limit and dims[-1] < n:
        depth += 1
        frame_idx = _greedy_frame(values, tol)
        new = [
            jet_bracket(jets[i], jets[j])
            for a, i in enumerate(frame_idx)
            for j in frame_idx[a + 1 :]
        ]
        jets.extend(new)
        values.extend(np.array([c.value for c in jf]) for jf in new)
        dims.append(numerical_rank(values, tol))
        if dims[-1] == dims[-2]:
            break

    expected = list(range(2, min(n, 2 + depth) + 1))
    goursat = dims == expected
    return FlagReport(point=point, dims=dims, goursat=goursat, depth_used=depth, tol=tol)


def _greedy_frame(values, tol):
    """Indices of a pointwise-independent spanning subset, in list order."""
    idx = []
    chosen = []
    for i, v in enumerate(values):
        if numerical_rank(chosen + [v], tol) > len(idx):
            idx.append(i)
            chosen.append(v)
    return idx


# ---------------------------------------------------------------------------
# named systems


def unicycle_fields():
    """Rotation and heading-drive fields on R^2 x S^1, chart (x, y, theta0)."""
    rot = VectorField(3, lambda q: [0.0, 0.0, 1.0], "rotate")
    drv = VectorField(3, lambda q: [cos(q[2]), sin(q[2]), 0.0], "head")
    return Distribution([rot, drv])


def trailer_fields(n):
    """Unicycle towing n trailers; chart (x, y, theta_0, ..., theta_n).

    (x, y) is the last trailer's axle; theta_i are absolute axle angles from
    the last trailer up to the towing unicycle.  Built by the one-trailer-at-
    a-time recursion with unit hitch distances.
    """
    if n < 0:
        raise ValueError("trailer count must be >= 0")
    dim = n + 3

    def tau1(q):
        out = [0.0] * dim
        out[dim - 1] = 1.0
        return out

    def tau2(q):
        # iterate the prolongation downward: head speed 1, each relative
        # angle converts speed into rotation of the next trailer
        out = [0.0] * dim
        v = 1.0
        for k in range(n, 0, -1):
            delta = q[2 + k] - q[1 + k]
            out[1 + k] = v * sin(delta)
            v = v * cos(delta)
        out[0] = v * cos(q[2])
        out[1] = v * sin(q[2])
        return out

    f1 = VectorField(dim, tau1, f"tau{n}_1")
    f2 = VectorField(dim, tau2, f"tau{n}_2")
    return Distribution([f1, f2])


STEER_LIMIT = np.pi / 4


def _check_steering(phi_value):
    if abs(phi_value) >= STEER_LIMIT:
        raise SteeringOutOfRange(f"steering angle {phi_value:.4f} outside (-pi/4, pi/4)")


def car_fields(l=1.0):
    """Steer and drive fields of a car, chart (x, y, theta, phi)."""
    if l <= 0:
        raise ValueError("axle span l must be positive")

    steer = VectorField(4, lambda q: [0.0, 0.0, 0.0, 1.0], "steer")

    def drive(q):
        _check_steering(scalar_value(q[3]))
        return [cos(q[2]), sin(q[2]), tan(q[3]) * (1.0 / l), 0.0]

    return Distribution([steer, VectorField(4, drive, "drive")])


def car_turn_park(l=1.0):
    """Closed forms of the first two bracket fields of (steer, drive).

    turn = h(phi) d/dtheta and park = h(phi)(sin theta d/dx - cos theta d/dy)
    with h(phi) = 1 / (l cos^2 phi).
    """

    def turn(q):
        c = cos(q[3])
        h = 1.0 / (l * c * c)
        return [0.0, 0.0, h, 0.0]

    def park(q):
        c = cos(q[3])
        h = 1.0 / (l * c * c)
        return [h * sin(q[2]), -(h * cos(q[2])), 0.0, 0.0]

    return VectorField(4, turn, "turn"), VectorField(4, park, "park")


def car_trailer_fields(n, l=1.0):
    """Car towing n trailers; chart (x, y, theta_0, ..., theta_n, phi).

    The car's rear axle is the towing head (angle theta_n); trailers hitch
    rear-axle-center to axle-center at unit distance, as in trailer_fields.
    """
    if n < 0:
        raise ValueError("trailer count must be >= 0")
    if l <= 0:
        raise ValueError("axle span l must be positive")
    dim = n + 4

    steer = VectorField(dim, lambda q: [0.0] * (dim - 1) + [1.0], "steer")

    def drive(q):
        _check_steering(scalar_value(q[dim - 1]))
        out = [0.0] * dim
        out[2 + n] = tan(q[dim - 1]) * (1.0 / l)
        v = 1.0
        for k in range(n, 0, -1):
            delta = q[2 + k] - q[1 + k]
            out[1 + k] = v * sin(delta)
            v = v * cos(delta)
        out[0] = v * cos(q[2])
        out[1] = v * sin(q[2])
        return out

    return Distribution([steer, VectorField(dim, drive, "drive")])


def goursat_normal_form(n):
    """The unit-growth normal-form pair on R^n (coordinates x_1..x_n)."""
    if n < 3:
        raise ValueError("normal form needs dimension >= 3")

    v1 = VectorField(n, lambda q: [0.0] * (n - 1) + [1.0], "e_n")

    def v2(q):
        out = [0.0] * n
        out[0] = 1.0
        for k in range(3, n + 1):          # x_k d/dx_{k-1}
            out[k - 2] = q[k - 1]
        return out

    return Distribution([v1, VectorField(n, v2, "chain")])


def cartan_distribution(s):
    """Jet-space tangency distribution on R^{s+2}, chart (x, y, z_1..z_s).

    Realized by the two kernel fields of the contact forms
    dz_{i-1} - z_i dx: X1 = d/dz_s and X2 = d/dx + z_1 d/dy + z_2 d/dz_1 +
    ... + z_s d/dz_{s-1}.
    """
    if s < 1:
        raise ValueError("jet order s must be >= 1")
    dim = s + 2

    x1 = VectorField(dim, lambda q: [0.0] * (dim - 1) + [1.0], "dz_s")

    def x2(q):
        out = [0.0] * dim
        out[0] = 1.0
        for j in range(1, s + 1):
            out[j] = q[j + 1]
        return out

    return Distribution([x1, VectorField(dim, x2, "total-derivative")])


def cartan_form_residuals(s, point, vector):
    """Values of the s contact forms on ``vector`` at ``point``."""
    return [vector[i] - point[i + 1] * vector[0] for i in range(1, s + 1)]


def prolongation_point(f_derivs, x):
    """Point of the s-jet chart on the lift of a function: (x, f, f', ..)."""
    return [x] + list(f_derivs)


def forgetful_projection_check(point4, l=1.0, tol=None):
    """Residual of pushing the car's first prolongation down to the unicycle.

    Pushes (steer, drive, turn) at ``point4`` forward under
    (x, y, theta, phi) -> (x, y, theta) and measures the worst distance of
    the (normalized) pushed vectors from the span of the unicycle pair at
    the projected point.  Also returns the projected rank.
    """
    dist_c = car_fields(l)
    turn, _ = car_turn_park(l)
    gens = list(dist_c.generators) + [turn]
    pushed = [g.at(point4)[:3] for g in gens]

    base = unicycle_fields()
    span = np.column_stack([g.at(point4[:3]) for g in base.generators])

    worst = 0.0
    for v in pushed:
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        u = v / nv
        coef, *_ = np.linalg.lstsq(span, u, rcond=None)
        worst = max(worst, float(np.linalg.norm(span @ coef - u)))
    rank = numerical_rank(pushed, tol or DEFAULT_RANK_TOL)
    return worst, rank
