"""Tests for homotopies, horn filling, lifting and deformations."""

import random
from fractions import Fraction

import pytest

from controlled_modules.control import MetricSpace, minimal_certificate, minimal_module_condition

from controlled_modules.exceptions import OverlapError, SquareError, WitnessError
from controlled_modules.homotopy import (
    EquivalenceWitness,
    Homotopy,
    concat,
    cylinder,
    cylinder_retraction,
    deformation_coretraction,
    homotopy_sum,
    identity_witness,
    isomorphism_witness,
    kan_fill,
    kan_fill_elements,
    lift_element,
    mapping_cylinder,
    mapping_cylinder_map,
    push_deformation,
    relative_horn_fill,
    relative_lift,
    reverse,
    saturation_compose,
    strong_deformation,
    trivial,
    verify_equivalence,
    whisker,
)
from controlled_modules.modules import (
    CellularModule,
    ModuleMap,
    identity_map,
    point_module,
    pushout,
    quotient,
    random_module,
    simplex_module,
    tensor_sset,
    zero_map,
)
from controlled_modules.rings import IntegerRing, ModularRing
from controlled_modules.simplicial import horn, standard_simplex

Z = IntegerRing()


def edge_module():
    M = CellularModule(Z).attach_cell("a", 0).attach_cell("b", 0)
    return M.attach_cell("e", 1, (M.top("b"), M.top("a")))


def point_to(M, name):
    """The map from the point picking out the vertex ``name``."""
    P = point_module(Z)
    return ModuleMap(P, M, {"*": M.top(name)})


def collapse(M):
    """M -> point sending every vertex to the point and e to its degeneracy."""
    P = point_module(Z)
    s = P.degeneracy(P.top("*"), 0)
    return ModuleMap(M, P, {"a": P.top("*"), "b": P.top("*"), "e": s})


def path_homotopy(M):
    """The homotopy from a to b that runs along e."""
    P = point_module(Z)
    PX = tensor_sset(P, standard_simplex(1))
    values = {(0,): M.top("a"), (1,): M.top("b"), (0, 1): M.top("e")}
    return Homotopy(ModuleMap(PX, M, {name: values[name[1]] for name in PX.cells}))


class TestKanFilling:
    """Tests for filling horns of elements."""

    def test_fill_one_dimensional_horn(self):
        M = edge_module()
        w = kan_fill_elements(M, 1, 0, {1: M.top("a")})
        assert M.face(w, 1) == M.top("a")

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_fill_two_dimensional_horn(self, j):
        S = simplex_module(Z, standard_simplex(2))
        top = [name for name, cell in S.cells.items() if cell.dim == 2][0]
        x = S.top(top)
        faces = {i: S.face(x, i) for i in range(3) if i != j}
        w = kan_fill_elements(S, 2, j, faces, check=True)
        for i, y in faces.items():
            assert S.face(w, i) == y


class TestRelativeFilling:
    """Tests for filling and lifting maps out of horns."""

    @staticmethod
    def horn_map(M, T, value):
        """M[Lambda^1_0] -> T sending each vertex of M to value(cell)."""
        ML = tensor_sset(M, horn(1, 0))
        return ModuleMap(ML, T, {name: value(name[0]) for name in ML.cells})

    def test_kan_fill(self):
        T = edge_module()
        P = point_module(Z)
        F = kan_fill(self.horn_map(P, T, lambda c: T.top("a")), 1, 0)
        start = [name for name in F.source.cells if name[1] == (0,)]
        assert [F.images[name] for name in start] == [T.top("a")]

    def test_relative_to_a_subcomplex(self):
        T = edge_module()
        M = CellularModule(Z).attach_cell("x", 0).attach_cell("y", 0)
        P = point_module(Z)
        incl = ModuleMap(P, M, {"*": M.top("x")})
        g = trivial(ModuleMap(P, T, {"*": T.top("a")})).carrier
        h = self.horn_map(M, T, lambda c: T.top("a") if c == "x" else T.top("b"))
        F = relative_horn_fill(incl, g, h, 1, 0).map
        for (a, x, s, t), value in g.images.items():
            assert F.images[("x", x, s, t)] == value

    def test_disagreeing_data(self):
        T = edge_module()
        M = CellularModule(Z).attach_cell("x", 0).attach_cell("y", 0)
        P = point_module(Z)
        incl = ModuleMap(P, M, {"*": M.top("x")})
        g = trivial(ModuleMap(P, T, {"*": T.top("b")})).carrier
        h = self.horn_map(M, T, lambda c: T.top("a"))
        with pytest.raises(OverlapError):
            relative_horn_fill(incl, g, h, 1, 0)

    @staticmethod
    def bottom(q):
        """P[Delta^1] -> T/U running along the image of e."""
        Q = q.module
        PX = tensor_sset(point_module(Z), standard_simplex(1))
        values = {(0,): Q.zero(0), (1,): Q.top("b"), (0, 1): Q.top("e")}
        return ModuleMap(PX, Q, {name: values[name[1]] for name in PX.cells})

    def test_relative_lift(self):
        T = edge_module()
        q = quotient(T, ["a"])
        h = self.horn_map(point_module(Z), T, lambda c: T.top("a"))
        bottom = self.bottom(q)
        F = relative_lift(None, None, h, bottom, q, 1, 0).map
        assert q.projection.compose(F) == bottom

    def test_lift_needs_a_square(self):
        T = edge_module()
        q = quotient(T, ["a"])
        h = self.horn_map(point_module(Z), T, lambda c: T.top("b"))
        with pytest.raises(SquareError):
            relative_lift(None, None, h, self.bottom(q), q, 1, 0)


class TestLifting:
    """Tests for lifting elements along a quotient."""

    def test_lift_keeps_the_named_cell(self):
        M = edge_module()
        q = quotient(M, ["a", "b"])
        w = lift_element(q, 1, 0, {1: M.top("a")}, q.module.top("e"))
        assert M.face(w, 1) == M.top("a")
        assert q.projection(w) == q.module.top("e")

    def test_lift_corrects_a_face(self):
        M = edge_module()
        q = quotient(M, ["a", "b"])
        w = lift_element(q, 1, 0, {1: M.top("b")}, q.module.top("e"))
        assert M.face(w, 1) == M.top("b")
        assert q.projection(w) == q.module.top("e")


class TestHomotopies:
    """Tests for building and combining homotopies."""

    def test_path_endpoints(self):
        M = edge_module()
        H = path_homotopy(M)
        H.verify(point_to(M, "a"), point_to(M, "b"))

    def test_trivial(self):
        f = point_to(edge_module(), "a")
        trivial(f).verify(f, f, rel=["*"])

    def test_not_relative(self):
        with pytest.raises(WitnessError):
            path_homotopy(edge_module()).verify(rel=["*"])

    def test_wrong_endpoint(self):
        M = edge_module()
        with pytest.raises(WitnessError) as exc_info:
            path_homotopy(M).verify(end=point_to(M, "a"))
        assert exc_info.value.equation == "H(1) = end"

    def test_reverse(self):
        M = edge_module()
        reverse(path_homotopy(M)).verify(point_to(M, "b"), point_to(M, "a"))

    def test_concat(self):
        M = edge_module()
        H = path_homotopy(M)
        loop = concat(H, reverse(H))
        loop.verify(point_to(M, "a"), point_to(M, "a"))

    def test_concat_mismatch(self):
        H = path_homotopy(edge_module())
        with pytest.raises(OverlapError):
            concat(H, H)

    def test_sum(self):
        M = edge_module()
        a = point_to(M, "a")
        H = homotopy_sum(path_homotopy(M), trivial(a))
        H.verify(a.add(a), point_to(M, "b").add(a))

    def test_whisker_by_identity(self):
        M = edge_module()
        H = path_homotopy(M)
        assert whisker(H, post=identity_map(M)).carrier == H.carrier


class TestEquivalences:
    """Tests for equivalence witnesses and two-out-of-three."""

    def test_identity_witness(self):
        assert verify_equivalence(identity_witness(edge_module()))

    def test_broken_witness(self):
        M = edge_module()
        ident = identity_map(M)
        zero = zero_map(M, M)
        w = EquivalenceWitness(ident, zero, trivial(ident), trivial(ident))
        assert not verify_equivalence(w)

    def test_isomorphism_witness(self):
        M = edge_module()
        ident = identity_map(M)
        isomorphism_witness(ident, ident).verify()
        with pytest.raises(WitnessError):
            isomorphism_witness(ident, zero_map(M, M))

    def test_saturation_from_both_factors(self):
        M = edge_module()
        w = identity_witness(M)
        ident = identity_map(M)
        result = saturation_compose(ident, ident, w_f=w, w_g=w)
        assert result.forward == ident

    def test_saturation_from_composite(self):
        M = edge_module()
        w = identity_witness(M)
        ident = identity_map(M)
        saturation_compose(ident, ident, w_f=w, w_gf=w)
        saturation_compose(ident, ident, w_g=w, w_gf=w)

    def test_saturation_needs_two(self):
        M = edge_module()
        with pytest.raises(WitnessError):
            saturation_compose(identity_map(M), identity_map(M), w_f=identity_witness(M))


class TestCylinders:
    """Tests for cylinders, mapping cylinders and deformation retractions."""

    def test_cylinder(self):
        M = edge_module()
        cyl = cylinder(M)
        assert len(cyl.module) == 11
        assert cyl.p.compose(cyl.i0) == identity_map(M)
        assert cyl.p.compose(cyl.i1) == identity_map(M)

    def test_mapping_cylinder(self):
        M = edge_module()
        Tf = mapping_cylinder(point_to(M, "a"))
        assert len(Tf.module) == 5
        Tf.check_axioms()

    def test_mapping_cylinder_map(self):
        f = point_to(edge_module(), "a")
        Tf = mapping_cylinder(f)
        induced = mapping_cylinder_map(Tf, Tf, identity_map(f.source), identity_map(f.target))
        assert induced == identity_map(Tf.module)

    def test_mapping_cylinder_map_needs_square(self):
        M = edge_module()
        f, g = point_to(M, "a"), point_to(M, "b")
        with pytest.raises(SquareError):
            mapping_cylinder_map(mapping_cylinder(f), mapping_cylinder(g), identity_map(f.source), identity_map(M))

    def test_cylinder_retraction(self):
        data = cylinder_retraction(point_to(edge_module(), "a"))
        assert data.retraction.compose(data.inclusion) == identity_map(data.inclusion.source)

    def test_deformation_coretraction(self):
        P = point_module(Z)
        data = deformation_coretraction(identity_map(P), identity_witness(P))
        data.verify()

    def test_strong_deformation(self):
        M = edge_module()
        data = strong_deformation(identity_map(M), identity_witness(M))
        assert data.retraction == identity_map(M)

    def test_push_deformation(self):
        M = edge_module()
        data = cylinder_retraction(point_to(M, "a"))
        po = pushout(data.inclusion, collapse(M))
        pushed = push_deformation(po, data)
        assert pushed.inclusion == po.leg_C


def metric_label(rng):
    return (Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])),)


def random_element(M, rng, degree):
    """A random combination of the degree-n basis of M."""
    return M.linear(degree, [(M.ring.random(rng), M.basis_element(e, s)) for e, s in M.basis(degree)])


def relabeled(M, rng):
    """The identity of M into a copy with fresh random labels."""
    N = M.relabel({e: metric_label(rng) for e in M.cells})
    return ModuleMap(M, N, {e: N.top(e) for e in M.cells}, check=False)


def constant_horn(f, n, k):
    """f . projection restricted to M[Lambda^n_k]."""
    ML = tensor_sset(f.source, horn(n, k))
    return ModuleMap(ML, f.target, {name: f.target.apply(f.images[name[0]], name[2]) for name in ML.cells})


def vertices(M):
    return [e for e, c in M.cells.items() if c.dim == 0]


class TestRandomFilling:
    """Horn filling and lifting on random modules."""

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("degree", [1, 2, 3])
    def test_fill_every_horn_mod_three(self, seed, degree):
        rng = random.Random(seed)
        M = random_module(ModularRing(3), rng, vertices=3, edges=3, triangles=1)
        w = random_element(M, rng, degree)
        for j in range(degree + 1):
            faces = {i: M.face(w, i) for i in range(degree + 1) if i != j}
            filler = kan_fill_elements(M, degree, j, faces, check=True)
            for i, y in faces.items():
                assert M.face(filler, i) == y

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("degree", [1, 2])
    def test_lift_every_horn_mod_three(self, seed, degree):
        rng = random.Random(50 + seed)
        M = random_module(ModularRing(3), rng, vertices=3, edges=3, triangles=1)
        q = quotient(M, vertices(M))
        w = random_element(M, rng, degree)
        for j in range(degree + 1):
            faces = {i: M.face(w, i) for i in range(degree + 1) if i != j}
            lifted = lift_element(q, degree, j, faces, q.projection(w))
            assert q.projection(lifted) == q.projection(w)
            for i, y in faces.items():
                assert M.face(lifted, i) == y

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("n, k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
    def test_fill_is_controlled(self, seed, n, k):
        rng = random.Random(100 + seed)
        space = MetricSpace(1)
        M = random_module(Z, rng, vertices=3, edges=3, triangles=1, labels=metric_label)
        f = relabeled(M, rng)
        E_M = minimal_module_condition(M, space)
        E_f = minimal_certificate(f, space)
        result = relative_horn_fill(None, None, constant_horn(f, n, k), n, k, space, E_M, E_f)
        assert result.certificate.recheck()
        assert minimal_certificate(result.map, space).alpha <= E_M.alpha + E_f.alpha

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("k", [0, 1])
    def test_lift_is_controlled(self, seed, k):
        rng = random.Random(200 + seed)
        space = MetricSpace(1)
        M = random_module(Z, rng, vertices=3, edges=3, triangles=1, labels=metric_label)
        f = relabeled(M, rng)
        h = constant_horn(f, 1, k)
        G = kan_fill(h, 1, k)
        q = quotient(f.target, vertices(f.target))
        bottom = q.projection.compose(G)
        conditions = {
            "E_M": minimal_module_condition(M, space),
            "E_f": minimal_certificate(G, space),
            "E_h": minimal_certificate(h, space),
            "E_P": minimal_module_condition(f.target, space),
        }
        result = relative_lift(None, None, h, bottom, q, 1, k, space, conditions)
        assert q.projection.compose(result.map) == bottom
        assert result.certificate.recheck()


class TestNontrivialWitnesses:
    """Equivalences whose homotopies are not constant."""

    @staticmethod
    def back_witness():
        """The point as the back end of its own cylinder, an edge."""
        data = cylinder_retraction(identity_map(point_module(Z)))
        return data, data.witness()

    def test_witness_moves(self):
        data, w = self.back_witness()
        assert len(data.inclusion.target) == 3
        assert w.right.carrier != trivial(identity_map(data.inclusion.target)).carrier
        assert verify_equivalence(w)

    def test_deformation_coretraction(self):
        data, w = self.back_witness()
        coretraction = deformation_coretraction(data.inclusion, w)
        coretraction.verify()
        assert coretraction.retraction.compose(coretraction.inclusion) == identity_map(point_module(Z))

    def test_saturation_from_both_factors(self):
        data, w_back = self.back_witness()
        P = point_module(Z)
        back, p = data.inclusion, data.retraction
        w_p = EquivalenceWitness(p, back, data.homotopy, trivial(identity_map(P))).verify()
        composite = saturation_compose(p, back, w_f=w_p, w_g=w_back)
        assert composite.forward == back.compose(p)
        assert saturation_compose(p, back, w_f=w_p, w_gf=composite).forward == back
        assert saturation_compose(p, back, w_g=w_back, w_gf=composite).forward == p

    def test_saturation_through_the_point(self):
        data, w_back = self.back_witness()
        P = point_module(Z)
        back, p = data.inclusion, data.retraction
        w_p = saturation_compose(back, p, w_f=w_back, w_gf=identity_witness(P))
        assert w_p.forward == p
        assert saturation_compose(back, p, w_g=w_p, w_gf=identity_witness(P)).forward == back
