"""Constructive Waldhausen axioms for cellular modules.

Every function here returns explicit witnesses (maps and homotopies) and
checks them on cells before returning:

- pushouts along acyclic cofibrations (two-pushouts comparison)
- the gluing lemma for maps of spans
- the extension axiom for maps of cofiber sequences
"""

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .exceptions import HomotopyError, SquareError, StageError, WitnessError
from .homotopy import (
    DeformationData,
    EquivalenceWitness,
    Homotopy,
    MappingCylinder,
    concat,
    corestrict,
    cylinder_retraction,
    deformation_coretraction,
    delta,
    homotopy_sum,
    identity_witness,
    image_cells,
    isomorphism_witness,
    kan_fill_elements,
    mapping_cylinder,
    mapping_cylinder_map,
    projection,
    push_deformation,
    relative_horn_fill,
    relative_lift,
    require_equal,
    reverse,
    saturation_compose,
    slide,
    strong_deformation,
    tensor_induced,
    trivial,
    vertex_inclusion,
    whisker,
)
from .logging_config import get_logger
from .modules import (
    Element,
    ModuleMap,
    Pushout,
    Quotient,
    identity_map,
    pushout,
    quotient,
    require_cellular_inclusion,
    submodule,
    tensor_map_of_module_map,
    tensor_sset,
)
from .simplicial import horn

logger = get_logger("waldhausen")


def _check_square(top_right: ModuleMap, bottom_left: ModuleMap) -> None:
    cell = top_right.first_difference(bottom_left)
    if cell is not None:
        raise SquareError(cell)


def cofiber(inclusion: ModuleMap) -> Quotient:
    """B/A for a cellular inclusion A -> B; cells keep their B names."""
    return quotient(inclusion.target, image_cells(inclusion))


# ---------------------------------------------------------------------------
# Pushouts along acyclic cofibrations
# ---------------------------------------------------------------------------


@dataclass
class TwoPushoutData:
    """Comparison between C and the mapping cylinder T(j) of j: A >-> C.

    e: T(j) -> C is the projection, g: C -> T(j) satisfies g.j = front,
    H: C[Delta^1] -> C runs from e.g to id relative to A and
    G: T(j)[Delta^1] -> T(j) runs from id to g.e relative to the front.
    """

    inclusion: ModuleMap
    cylinder: MappingCylinder
    e: ModuleMap
    g: ModuleMap
    H: Homotopy
    G: Homotopy

    def verify(self) -> "TwoPushoutData":
        """Check the eight equations.

        Raises:
            WitnessError: naming the failing equation and cell
        """
        T = self.cylinder
        C = self.inclusion.target
        eg, ge = self.e.compose(self.g), self.g.compose(self.e)
        require_equal("H(0) = e.g", self.H.start, eg)
        require_equal("H(1) = id", self.H.end, identity_map(C))
        require_equal("G(0) = id", self.G.start, identity_map(T.module))
        require_equal("G(1) = g.e", self.G.end, ge)
        cell = self.G.relative_defect(image_cells(T.front))
        if cell is not None:
            raise WitnessError("G relative to the front", cell)
        cell = self.H.relative_defect(image_cells(self.inclusion))
        if cell is not None:
            raise WitnessError("H relative to A", cell)
        require_equal("g.j = front", self.g.compose(self.inclusion), T.front)
        require_equal("e.front = j", self.e.compose(T.front), self.inclusion)
        return self


def two_pushouts(j: ModuleMap) -> TwoPushoutData:
    """Build e, g, H and G for a cellular inclusion j: A >-> C.

    R: C[Delta^1] -> T(j) extends the back inclusion at vertex 1 and the
    cylinder part over A; g is R at vertex 0.  G slides C[Delta^1] by
    (s, t) -> min(s, t) and is reversed to start at the identity.
    """
    corr = require_cellular_inclusion(j)
    A, C = j.source, j.target
    T = mapping_cylinder(j)
    X = delta(1)
    CL = tensor_sset(C, horn(1, 1))
    h = ModuleMap(CL, T.module, {
        name: T.module.apply(T.back.images[name[0]], name[2]) for name in CL.cells
    }, check=False)
    R = relative_horn_fill(j, T.po.leg_B, h, 1, 1).map
    g = R.compose(vertex_inclusion(C, X, (0,)))
    e = T.projection
    H = Homotopy(e.compose(R))
    J = T.po.induced(vertex_inclusion(C, X, (1,)), tensor_map_of_module_map(j, X))
    G_back = Homotopy(R.compose(slide(C, min)).compose(tensor_map_of_module_map(J, X)))
    G = reverse(G_back, image_cells(T.front))
    logger.debug("two-pushout data over %d cells of C (%d from A)", len(C), len(corr))
    return TwoPushoutData(j, T, e, g, H, G).verify()


@dataclass
class PushoutEquivalence:
    """Witness that B -> D = B u_A C is an equivalence when A >-> C is one."""

    pushout: Pushout
    witness: EquivalenceWitness
    data: TwoPushoutData
    cylinder_pushout: Pushout
    q: ModuleMap
    q_inverse: ModuleMap


def pushout_equivalence(j: ModuleMap, w_j: EquivalenceWitness, f: ModuleMap) -> PushoutEquivalence:
    """Equivalence witness for the leg B -> D of the pushout of f: A -> B along j.

    B -> Q = B u_A T(j) is the pushed deformation of A into T(j); Q -> D
    collapses the cylinder with e and has inverse built from g, with the
    homotopies H and G pushed into the pushouts.

    Raises:
        WitnessError: if w_j does not verify j
    """
    w_j.verify()
    require_equal("witness is for j", w_j.forward, j)
    data = two_pushouts(j)
    T = data.cylinder
    D = pushout(j, f)
    Q = pushout(T.front, f)
    B = f.target
    X = delta(1)
    to_Q = push_deformation(Q, deformation_coretraction(j, w_j, T)).witness()
    q = Q.induced(D.leg_C, D.leg_B.compose(data.e))
    q_inverse = D.induced(Q.leg_C, Q.leg_B.compose(data.g))
    H_D = Homotopy(tensor_induced(D, X, D.leg_C.compose(projection(B, X)), D.leg_B.compose(data.H.carrier)))
    G_Q = Homotopy(tensor_induced(Q, X, Q.leg_C.compose(projection(B, X)), Q.leg_B.compose(data.G.carrier)))
    to_D = EquivalenceWitness(q, q_inverse, reverse(G_Q), H_D).verify()
    composed = saturation_compose(Q.leg_C, q, w_f=to_Q, w_g=to_D)
    witness = EquivalenceWitness(D.leg_C, composed.inverse, composed.left, composed.right).verify()
    logger.info("pushout along an acyclic cofibration: witness over %d cells", len(D.D))
    return PushoutEquivalence(D, witness, data, Q, q, q_inverse)


# ---------------------------------------------------------------------------
# Gluing lemma
# ---------------------------------------------------------------------------


@dataclass
class Span:
    """B <-< A -> C with i a cellular inclusion."""

    i: ModuleMap
    f: ModuleMap

    @property
    def pushout(self) -> Pushout:
        return pushout(self.i, self.f)


@dataclass
class SpanMap:
    """Componentwise map a, b, c between spans with their witnesses."""

    a: ModuleMap
    b: ModuleMap
    c: ModuleMap
    w_a: EquivalenceWitness
    w_b: EquivalenceWitness
    w_c: EquivalenceWitness


@dataclass
class _CylinderGluing:
    """Pushouts E1 = D u_C T(c) and E2 = E1 u_(B u_A T(a)) T(b) along one end."""

    E1: Pushout
    G: Pushout
    J: ModuleMap
    E2: Pushout
    into_E2: EquivalenceWitness


@dataclass
class GluingResult:
    map: ModuleMap
    witness: EquivalenceWitness
    source: Pushout
    target: Pushout
    stages: dict = field(default_factory=dict)


def _glue_cylinders(
    span: Span,
    D: Pushout,
    Ta: MappingCylinder,
    Tb: MappingCylinder,
    Tc: MappingCylinder,
    u_ab: ModuleMap,
    u_ac: ModuleMap,
    end: str,
    deformations: dict[str, DeformationData],
) -> _CylinderGluing:
    """Attach T(c) and T(b) to D along the ``end`` inclusions of the cylinders."""
    ends = {name: getattr(T, end) for name, T in (("a", Ta), ("b", Tb), ("c", Tc))}
    E1 = pushout(ends["c"], D.leg_C)
    first = push_deformation(E1, deformations["c"])
    side = pushout_equivalence(ends["a"], deformations["a"].witness(), span.i)
    G = side.pushout
    J = G.induced(ends["b"], u_ab)
    w_J = saturation_compose(G.leg_C, J, w_f=side.witness, w_gf=deformations["b"].witness())
    gamma = G.induced(E1.leg_C.compose(D.leg_B), E1.leg_B.compose(u_ac))
    E2 = pushout(J, gamma)
    try:
        second = push_deformation(E2, strong_deformation(J, w_J))
    except HomotopyError as err:
        raise StageError(f"{end} gluing", err) from err
    into_E2 = saturation_compose(
        E1.leg_C, E2.leg_C, w_f=first.witness(), w_g=second.witness()
    )
    return _CylinderGluing(E1, G, J, E2, into_E2)


def gluing(top: Span, bottom: Span, maps: SpanMap) -> GluingResult:
    """Witness for the induced map of pushouts B u_A C -> B' u_A' C'.

    Both pushouts are compared with T(b) u_T(a) T(c): D reaches it by
    attaching the cylinders along their front ends, D' along their back ends.
    The two results are the same module up to cell names, which is checked
    by an explicit pair of inverse maps.

    Raises:
        SquareError: if the span map does not commute
        WitnessError: if a witness fails to verify
    """
    a, b, c = maps.a, maps.b, maps.c
    _check_square(b.compose(top.i), bottom.i.compose(a))
    _check_square(c.compose(top.f), bottom.f.compose(a))
    for w, m, name in ((maps.w_a, a, "a"), (maps.w_b, b, "b"), (maps.w_c, c, "c")):
        w.verify()
        require_equal(f"witness is for {name}", w.forward, m)
    D, D2 = top.pushout, bottom.pushout
    phi = D.induced(D2.leg_C.compose(c), D2.leg_B.compose(b))
    Ta, Tb, Tc = mapping_cylinder(a), mapping_cylinder(b), mapping_cylinder(c)
    u_ab = mapping_cylinder_map(Ta, Tb, top.i, bottom.i)
    u_ac = mapping_cylinder_map(Ta, Tc, top.f, bottom.f)

    fronts = {
        "a": deformation_coretraction(a, maps.w_a, Ta),
        "b": deformation_coretraction(b, maps.w_b, Tb),
        "c": deformation_coretraction(c, maps.w_c, Tc),
    }
    forward = _glue_cylinders(top, D, Ta, Tb, Tc, u_ab, u_ac, "front", fronts)
    backs = {
        "a": cylinder_retraction(a, Ta),
        "b": cylinder_retraction(b, Tb),
        "c": cylinder_retraction(c, Tc),
    }
    backward = _glue_cylinders(bottom, D2, Ta, Tb, Tc, u_ab, u_ac, "back", backs)
    E1, E2 = forward.E1, forward.E2
    E1b, E2b = backward.E1, backward.E2

    to_D2 = E2.induced(
        E1.induced(phi, D2.leg_C.compose(Tc.projection)),
        D2.leg_B.compose(Tb.projection),
    )
    from_D2 = D2.induced(
        E2.leg_C.compose(E1.leg_B).compose(Tc.back),
        E2.leg_B.compose(Tb.back),
    )
    to_back = E2.induced(
        E1.induced(
            D.induced(
                E2b.leg_C.compose(E1b.leg_B).compose(Tc.front),
                E2b.leg_B.compose(Tb.front),
            ),
            E2b.leg_C.compose(E1b.leg_B),
        ),
        E2b.leg_B,
    )
    from_back = E2b.induced(E1b.induced(from_D2, E2.leg_C.compose(E1.leg_B)), E2.leg_B)
    iso = isomorphism_witness(from_back, to_back)
    w_from_D2 = saturation_compose(backward.E2.leg_C.compose(backward.E1.leg_C), from_back,
                                   w_f=backward.into_E2, w_g=iso)
    require_equal("cylinder routes agree on D'", w_from_D2.forward, from_D2)
    w_to_D2 = saturation_compose(from_D2, to_D2, w_f=w_from_D2, w_gf=identity_witness(D2.D))
    into_E2 = E2.leg_C.compose(E1.leg_C)
    composed = saturation_compose(into_E2, to_D2, w_f=forward.into_E2, w_g=w_to_D2)
    require_equal("induced map factors through the cylinders", composed.forward, phi)
    witness = EquivalenceWitness(phi, composed.inverse, composed.left, composed.right).verify()
    logger.info("gluing: witness for a map of pushouts with %d -> %d cells", len(D.D), len(D2.D))
    return GluingResult(phi, witness, D, D2, {"front": forward, "back": backward})


# ---------------------------------------------------------------------------
# Extension axiom
# ---------------------------------------------------------------------------


@dataclass
class ExtensionSetup:
    """Cofiber sequences A >-> B ->> B/A and T_A >-> T_B ->> T_B/T_A with inclusions.

    ``bar_inclusion`` is B/A >-> T_B/T_A; ``def_A`` and ``def_bar`` deform
    T_A onto A and T_B/T_A onto B/A.
    """

    inclusion: ModuleMap          # A >-> B
    cofiber: Quotient             # B ->> B/A
    inclusion_A: ModuleMap        # A >-> T_A
    inclusion_B: ModuleMap        # B >-> T_B
    cylinder_inclusion: ModuleMap  # T_A >-> T_B
    cylinder_cofiber: Quotient    # T_B ->> T_B/T_A
    bar_inclusion: ModuleMap      # B/A >-> T_B/T_A
    def_A: DeformationData
    def_bar: DeformationData

    def verify(self) -> "ExtensionSetup":
        _check_square(self.cylinder_inclusion.compose(self.inclusion_A), self.inclusion_B.compose(self.inclusion))
        _check_square(
            self.cylinder_cofiber.projection.compose(self.inclusion_B),
            self.bar_inclusion.compose(self.cofiber.projection),
        )
        require_equal("deformation of T_A is along A", self.def_A.inclusion, self.inclusion_A)
        require_equal("deformation of the cofiber is along B/A", self.def_bar.inclusion, self.bar_inclusion)
        return self


@dataclass
class ExtensionResult:
    """Homotopy rel D_0 from alpha to ``inclusion_B . into_B``."""

    homotopy: Homotopy
    into_B: ModuleMap
    stages: dict = field(default_factory=dict)


def _lift_cells(beta_bar: ModuleMap, cofiber: Quotient) -> ModuleMap:
    """Cellwise lift of D -> B/A to D -> B.

    Each cell starts at the same-named cell of B and corrects its faces by a
    horn fill at vertex 0 inside A; the remaining face must then agree.
    """
    D = beta_bar.source
    B = cofiber.projection.source
    images: dict[Hashable, Element] = {}
    for e in D.skeletal_order():
        cell = D.cells[e]
        start = Element(cell.dim, dict(beta_bar.images[e].terms))
        if cell.dim == 0:
            images[e] = start
            continue
        corrections = {
            i: B.sub(
                B.linear(a.degree, [(coef, B.apply(images[x], s)) for (x, s), coef in a.terms.items()]),
                B.face(start, i),
            )
            for i, a in enumerate(cell.attach)
        }
        w = kan_fill_elements(B, cell.dim, 0, {i: v for i, v in corrections.items() if i != 0})
        if B.face(w, 0) != corrections[0]:
            raise StageError("gamma", HomotopyError(f"no lift of cell {e!r} into B"))
        images[e] = B.add(start, w)
    return ModuleMap(D, B, images, check=True)


def extension_improve(setup: ExtensionSetup, alpha: ModuleMap, D0: Iterable[Hashable] = ()) -> ExtensionResult:
    """Deform alpha: (D, D_0) -> (T_B, B) relative to D_0 into a map that factors through B.

    Stages: H lifts the cofiber deformation of alpha-bar; beta is its end;
    gamma lifts beta-bar cellwise to B; epsilon = beta - gamma lands in T_A
    and is deformed onto A by G; G + gamma continues H.

    Raises:
        StageError: naming the stage whose precondition fails
    """
    D = alpha.source
    D0 = set(D0)
    jB = setup.inclusion_B
    T_B = jB.target
    direct = corestrict(alpha, jB)
    if direct is not None:
        return ExtensionResult(trivial(alpha), direct, {"trivial": True})
    X = delta(1)
    qT = setup.cylinder_cofiber
    alpha_bar = qT.projection.compose(alpha)
    H_bar = whisker(reverse(setup.def_bar.homotopy, setup.def_bar.sub), pre=alpha_bar)

    D0_module, D0_inclusion = submodule(D, D0)
    g = alpha.compose(D0_inclusion).compose(projection(D0_module, X))
    DL = tensor_sset(D, horn(1, 0))
    h = ModuleMap(DL, T_B, {name: T_B.apply(alpha.images[name[0]], name[2]) for name in DL.cells}, check=False)
    try:
        H = Homotopy(relative_lift(D0_inclusion, g, h, H_bar.carrier, qT, 1, 0).map)
    except HomotopyError as err:
        raise StageError("lift", err) from err
    beta = H.end

    beta_bar = corestrict(qT.projection.compose(beta), setup.bar_inclusion)
    if beta_bar is None:
        raise StageError("beta", HomotopyError("cofiber image of beta leaves B/A"))
    gamma = _lift_cells(beta_bar, setup.cofiber)
    jB_gamma = jB.compose(gamma)

    epsilon = corestrict(beta.sub(jB_gamma), setup.cylinder_inclusion)
    if epsilon is None:
        raise StageError("epsilon", HomotopyError("beta - gamma does not lie in T_A"))
    G = whisker(reverse(setup.def_A.homotopy, setup.def_A.sub), pre=epsilon, post=setup.cylinder_inclusion)
    second = homotopy_sum(G, trivial(jB_gamma))
    K = concat(H, second, D0)
    into_B = corestrict(K.end, jB)
    if into_B is None:
        raise StageError("final", HomotopyError("improved map does not factor through B"))
    K.verify(alpha, jB.compose(into_B), D0)
    logger.debug("extension improved a map out of %d cells", len(D))
    return ExtensionResult(K, into_B, {"beta": beta, "gamma": gamma, "epsilon": epsilon})


@dataclass
class ExtensionAxiomResult:
    witness: EquivalenceWitness
    setup: ExtensionSetup
    deformation: DeformationData


def _cofiber_cylinder_iso(T_C: MappingCylinder, T_B: MappingCylinder, bar: Quotient) -> tuple[ModuleMap, ModuleMap]:
    """T(f_C) = T_B / T_A, matching cells by where they come from."""
    images = {}
    for d, (side, cell) in T_C.po.origin.items():
        source = T_B.back.images[cell] if side == "C" else T_B.po.leg_B.images[cell]
        images[d] = bar.projection(source)
    forward = ModuleMap(T_C.module, bar.module, images, check=True)
    corr = require_cellular_inclusion(forward)
    back = {b: a for a, b in corr.items()}
    if len(back) != len(bar.module):
        raise WitnessError("cofiber cylinder has the cells of T_B / T_A")
    inverse = ModuleMap(bar.module, T_C.module, {b: T_C.module.top(a) for b, a in back.items()}, check=True)
    return forward, inverse


def extension_axiom(
    top: ModuleMap,
    bottom: ModuleMap,
    f_A: ModuleMap,
    f_B: ModuleMap,
    w_A: EquivalenceWitness,
    w_C: EquivalenceWitness,
) -> ExtensionAxiomResult:
    """Witness for f_B in a map of cofiber sequences with equivalences on the ends.

    Args:
        top: A >-> B
        bottom: A' >-> B'
        f_A, f_B: the vertical maps (f_C is induced on cofibers)
        w_A, w_C: witnesses for f_A and the induced f_C

    Raises:
        SquareError: if the square does not commute
        WitnessError: if a witness is for the wrong map or fails
        StageError: if the improvement of the identity of T_B fails
    """
    _check_square(f_B.compose(top), bottom.compose(f_A))
    bar, bar2 = cofiber(top), cofiber(bottom)
    f_C = ModuleMap(
        bar.module, bar2.module,
        {e: bar2.projection(f_B.images[e]) for e in bar.module.cells},
        check=True,
    )
    require_equal("witness is for the induced map on cofibers", w_C.forward, f_C)
    T_A, T_B = mapping_cylinder(f_A), mapping_cylinder(f_B)
    i_T = mapping_cylinder_map(T_A, T_B, top, bottom)
    T_bar = quotient(T_B.module, image_cells(i_T))
    bar_inclusion = ModuleMap(
        bar.module, T_bar.module,
        {e: T_bar.projection(T_B.front.images[e]) for e in bar.module.cells},
        check=True,
    )
    def_A = deformation_coretraction(f_A, w_A, T_A)
    T_C = mapping_cylinder(f_C)
    def_C = deformation_coretraction(f_C, w_C, T_C)
    to_bar, from_bar = _cofiber_cylinder_iso(T_C, T_B, T_bar)
    def_bar = DeformationData(
        bar_inclusion,
        def_C.retraction.compose(from_bar),
        whisker(def_C.homotopy, pre=from_bar, post=to_bar),
    ).verify()
    setup = ExtensionSetup(top, bar, T_A.front, T_B.front, i_T, T_bar, bar_inclusion, def_A, def_bar).verify()

    improved = extension_improve(setup, identity_map(T_B.module), image_cells(T_B.front))
    deformation = DeformationData(
        T_B.front, improved.into_B, reverse(improved.homotopy, image_cells(T_B.front))
    ).verify()
    back = cylinder_retraction(f_B, T_B)
    w_p = EquivalenceWitness(T_B.projection, T_B.back, back.homotopy, trivial(identity_map(f_B.target))).verify()
    composed = saturation_compose(T_B.front, T_B.projection, w_f=deformation.witness(), w_g=w_p)
    witness = EquivalenceWitness(f_B, composed.inverse, composed.left, composed.right).verify()
    logger.info("extension axiom: witness for the middle map over %d cells", len(f_B.source))
    return ExtensionAxiomResult(witness, setup, deformation)


# ---------------------------------------------------------------------------
# Toy situation: the same chase for finite abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z/n_1 x ... x Z/n_k as tuples of residues."""

    moduli: tuple[int, ...]

    def zero(self) -> tuple:
        return tuple(0 for _ in self.moduli)

    def add(self, x: Sequence[int], y: Sequence[int]) -> tuple:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.moduli))

    def sub(self, x: Sequence[int], y: Sequence[int]) -> tuple:
        return tuple((a - b) % n for a, b, n in zip(x, y, self.moduli))

    def elements(self) -> Iterable[tuple]:
        return itertools.product(*(range(n) for n in self.moduli))


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism given by the images of the standard generators."""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    columns: tuple[tuple[int, ...], ...]

    def __call__(self, x: Sequence[int]) -> tuple:
        out = self.target.zero()
        for coef, column in zip(x, self.columns):
            for _ in range(coef):
                out = self.target.add(out, column)
        return out

    def preimage(self, y: Sequence[int]) -> Optional[tuple]:
        y = tuple(y)
        return next((x for x in self.source.elements() if self(x) == y), None)


@dataclass(frozen=True)
class ToyDiagram:
    """Short exact rows A -> B -> C and A' -> B' -> C' with vertical maps."""

    i: GroupMap
    q: GroupMap
    i2: GroupMap
    q2: GroupMap
    f_A: GroupMap
    f_B: GroupMap
    f_C: GroupMap


def toy_extension_chase(diagram: ToyDiagram, alpha: Sequence[int]) -> tuple:
    """Preimage of alpha under f_B found by the extension chase.

    Raises:
        StageError: naming the step where an outer map has no preimage
    """
    d = diagram
    B, B2 = d.i.target, d.i2.target
    beta = d.f_C.preimage(d.q2(alpha))
    if beta is None:
        raise StageError("beta", HomotopyError("f_C misses the cofiber image"))
    gamma = d.q.preimage(beta)
    if gamma is None:
        raise StageError("gamma", HomotopyError("q is not surjective"))
    rest = d.i2.preimage(B2.sub(alpha, d.f_B(gamma)))
    if rest is None:
        raise StageError("epsilon", HomotopyError("difference is not in A'"))
    delta_ = d.f_A.preimage(rest)
    if delta_ is None:
        raise StageError("delta", HomotopyError("f_A misses the difference"))
    return B.add(d.i(delta_), gamma)
