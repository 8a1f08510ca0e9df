"""Tests for control spaces, conditions and certificates."""

import random
from fractions import Fraction

import pytest

from controlled_modules.control import (
    Ball,
    BallUnion,
    Certificate,
    FiniteSpace,
    MetricSpace,
    StagedDescription,
    bl_finite,
    certificate_add,
    certificate_compose,
    certificate_union,
    check_map,
    check_module,
    format_rational,
    minimal_certificate,
    minimal_module_condition,
    parse_rational,
    pushout_control,
    space_from_json,
    sqrt_ceiling,
)
from controlled_modules.exceptions import ControlError, ControlViolation, MixedSpacesError
from controlled_modules.modules import (
    CellularModule,
    ModuleMap,
    pushout,
    random_module,
    submodule,
)
from controlled_modules.rings import IntegerRing

Z = IntegerRing()


def line_module():
    """a at 0, b at 1 and an edge from a to b at 1/2."""
    M = CellularModule(Z).attach_cell("a", 0, (), "0").attach_cell("b", 0, (), "1")
    return M.attach_cell("e", 1, (M.top("b"), M.top("a")), "1/2")


def relabel_map(M, labels):
    """The identity of M into a copy carrying new labels."""
    N = M.relabel(labels)
    return ModuleMap(M, N, {e: N.top(e) for e in M.cells}, check=False)


def metric_label(rng):
    return (Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])),)


def finite_label(rng):
    return rng.randrange(5)


class TestRationals:
    """Tests for exact rational parsing and formatting."""

    def test_parse(self):
        assert parse_rational("3/6") == Fraction(1, 2)
        assert parse_rational(2) == 2

    def test_parse_rejects_floats(self):
        with pytest.raises(ControlError):
            parse_rational(0.5)

    def test_format(self):
        assert format_rational(Fraction(5, 2)) == "5/2"
        assert format_rational(Fraction(4, 2)) == "2"

    def test_sqrt_ceiling(self):
        assert sqrt_ceiling(Fraction(9, 4)) == Fraction(3, 2)
        assert sqrt_ceiling(Fraction(2)) == 2


class TestMetricSpace:
    """Tests for metric control spaces."""

    def test_max_metric(self):
        space = MetricSpace(2)
        assert space.close(("0", "0"), ("1", "1/2"), space.condition(1))
        assert not space.close(("0", "0"), ("1", "1/2"), space.condition("1/2"))

    def test_euclidean_metric(self):
        space = MetricSpace(2, "euclid2")
        assert space.alpha_for((0, 0), (3, 4)) == 5
        assert space.close((0, 0), (3, 4), space.condition(5))
        assert not space.close((0, 0), (3, 4), space.condition("9/2"))

    def test_dimension_mismatch(self):
        with pytest.raises(ControlError):
            MetricSpace(2).measure((0,), (0, 0))

    def test_negative_alpha(self):
        with pytest.raises(ControlError):
            MetricSpace(1).condition(-1)

    def test_condition_algebra(self):
        space = MetricSpace(1)
        a, b = space.condition("1/2"), space.condition(2)
        assert space.compose_conditions(a, b).alpha == Fraction(5, 2)
        assert space.union_conditions(a, b).alpha == 2
        assert space.contained(a, b)
        assert not space.contained(b, a)

    def test_mixed_conditions(self):
        finite = FiniteSpace([0, 1])
        with pytest.raises(MixedSpacesError):
            MetricSpace(1).compose_conditions(finite.diagonal(), MetricSpace(1).diagonal())

    def test_json(self):
        space = MetricSpace(2, "euclid2", points=[(0, 0), ("1/2", 1)])
        again = space_from_json(space.to_json())
        assert again == space
        assert space.condition_from_json({"alpha": "3/2"}).alpha == Fraction(3, 2)

    def test_thicken_needs_points(self):
        with pytest.raises(ControlError):
            MetricSpace(1).thicken([0], MetricSpace(1).condition(1))

    def test_thicken(self):
        space = MetricSpace(1, points=[0, 1, 2, 5])
        assert space.thicken([0], space.condition(2)) == {(0,), (1,), (2,)}


class TestFiniteSpace:
    """Tests for finite control spaces."""

    @pytest.fixture
    def space(self):
        return FiniteSpace(["x", "y", "z"], {"near": [("x", "y")], "far": [("y", "z")]}, {"left": ["x"]})

    def test_relations_are_symmetric_and_reflexive(self, space):
        near = space.relations["near"]
        assert ("y", "x") in near.pairs
        assert ("z", "z") in near.pairs

    def test_composition(self, space):
        both = space.compose_conditions(space.relations["near"], space.relations["far"])
        assert space.close("x", "z", both)
        assert space.close("z", "x", both)
        assert not space.close("x", "z", space.relations["near"])

    def test_unknown_point(self, space):
        with pytest.raises(ControlError):
            space.relation([("x", "w")])

    def test_condition_from_json(self, space):
        assert space.condition_from_json("near") == space.relations["near"]
        assert space.condition_from_json("diagonal") == space.diagonal()
        assert space.condition_from_json({"pairs": [["x", "y"]]}) == space.relations["near"]
        with pytest.raises(ControlError):
            space.condition_from_json("nowhere")

    def test_thicken_support(self, space):
        assert space.thicken_support("left", space.relations["near"]) == frozenset({"x", "y"})


class TestCertificates:
    """Tests for module and map certificates."""

    def test_module_certificate(self):
        space = MetricSpace(1)
        M = line_module()
        cert = check_module(M, space, space.condition("1/2"))
        assert cert.recheck()
        assert cert.to_json() == {"kind": "module", "condition": {"alpha": "1/2"}}

    def test_module_violation(self):
        space = MetricSpace(1)
        with pytest.raises(ControlViolation) as exc_info:
            check_module(line_module(), space, space.condition("1/4"))
        assert exc_info.value.cell == "e"
        assert exc_info.value.distance == Fraction(1, 2)

    def test_minimal_module_condition(self):
        assert minimal_module_condition(line_module(), MetricSpace(1)).alpha == Fraction(1, 2)

    def test_support(self):
        space = MetricSpace(1)
        M = line_module()
        inside = BallUnion((Ball((Fraction(0),), Fraction(1)),))
        check_module(M, space, space.condition(1), inside)
        outside = BallUnion((Ball((Fraction(0),), Fraction(1, 4)),))
        with pytest.raises(ControlViolation):
            check_module(M, space, space.condition(1), outside)
        assert space.in_support("1", space.thicken_support(outside, space.condition(1)))

    def test_map_certificate(self):
        space = MetricSpace(1)
        M = line_module()
        f = relabel_map(M, {"a": "2", "b": "1", "e": "1"})
        assert minimal_certificate(f, space).alpha == 2
        check_map(f, space, space.condition(2))
        with pytest.raises(ControlViolation):
            check_map(f, space, space.condition(1))

    def test_union_weakens(self):
        space = MetricSpace(1)
        cert = check_module(line_module(), space, space.condition("1/2"))
        weaker = certificate_union(cert, space.condition(3))
        assert weaker.condition.alpha == 3
        assert weaker.recheck()

    def test_failed_recheck(self):
        space = MetricSpace(1)
        cert = Certificate(line_module(), space.condition(0), space)
        assert not cert.recheck()

    @pytest.mark.parametrize("seed", range(25))
    def test_metric_compose_and_add(self, seed):
        rng = random.Random(seed)
        space = MetricSpace(1)
        M = random_module(Z, rng, vertices=3, edges=3, triangles=1, labels=metric_label)
        f = relabel_map(M, {e: metric_label(rng) for e in M.cells})
        g = relabel_map(f.target, {e: metric_label(rng) for e in M.cells})
        cert_f = check_map(f, space, minimal_certificate(f, space))
        cert_g = check_map(g, space, minimal_certificate(g, space))
        composed = certificate_compose(cert_f, cert_g)
        assert composed.recheck()
        assert minimal_certificate(g.compose(f), space).alpha <= cert_f.condition.alpha + cert_g.condition.alpha
        h = relabel_map(M, {e: f.target.label(e) for e in M.cells})
        summed = certificate_add(cert_f, check_map(h, space, minimal_certificate(h, space)))
        assert summed.recheck()

    @pytest.mark.parametrize("seed", range(25))
    def test_finite_compose(self, seed):
        rng = random.Random(1000 + seed)
        space = FiniteSpace(range(5))
        M = random_module(Z, rng, vertices=3, edges=3, triangles=1, labels=finite_label)
        f = relabel_map(M, {e: finite_label(rng) for e in M.cells})
        g = relabel_map(f.target, {e: finite_label(rng) for e in M.cells})
        cert_f = check_map(f, space, minimal_certificate(f, space))
        cert_g = check_map(g, space, minimal_certificate(g, space))
        assert certificate_compose(cert_f, cert_g).recheck()

    def test_compose_mixed_spaces(self):
        M = line_module()
        f = relabel_map(M, M.labels())
        metric = check_map(f, MetricSpace(1), MetricSpace(1).condition(1))
        cert = Certificate(f, FiniteSpace([0]).diagonal(), FiniteSpace([0]), kind="map")
        with pytest.raises(MixedSpacesError):
            certificate_compose(metric, cert)


class TestPushoutControl:
    """Tests for the predicted certificates of pushouts."""

    def test_line_example(self):
        space = MetricSpace(1)
        A = CellularModule(Z).attach_cell("a", 0, (), "0")
        B = line_module()
        C = CellularModule(Z).attach_cell("c", 0, (), "2")
        i = ModuleMap(A, B, {"a": B.top("a")})
        f = ModuleMap(A, C, {"a": C.top("c")})
        certs = pushout_control(
            pushout(i, f), space, space.condition("1/2"), space.condition(0), space.condition(2)
        )
        assert certs["D"].condition.alpha == Fraction(5, 2)
        assert certs["leg_B"].condition.alpha == Fraction(5, 2)
        assert certs["leg_C"].condition.alpha == 0

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("kind", ["metric", "finite"])
    def test_random_pushouts(self, seed, kind):
        rng = random.Random(seed)
        if kind == "metric":
            space, pick = MetricSpace(1), metric_label
        else:
            space, pick = FiniteSpace(range(5)), finite_label
        B = random_module(Z, rng, vertices=4, edges=4, triangles=1, labels=pick)
        A, i = submodule(B, ["v0", "v1"])
        f = relabel_map(A, {e: pick(rng) for e in A.cells})
        po = pushout(i, f)
        certs = pushout_control(
            po, space,
            minimal_module_condition(B, space),
            minimal_module_condition(f.target, space),
            minimal_certificate(f, space),
        )
        for cert in certs.values():
            assert cert.recheck()


class TestBoundedLocalFiniteness:
    """Tests for the bounded local finiteness check."""

    def test_finite_module(self):
        result = bl_finite(line_module(), MetricSpace(1))
        assert result
        assert result.witness["dimension"] == 1

    def test_spread_out_stages(self):
        staged = StagedDescription(lambda k: [(k, 0)], "line")
        assert bl_finite(staged, MetricSpace(1), horizon=16)

    def test_piling_stages(self):
        staged = StagedDescription(lambda k: [(0, 0)], "pile")
        result = bl_finite(staged, MetricSpace(1), horizon=16)
        assert not result
        assert result.reason == "ball counts keep growing"

    def test_dimension_bound(self):
        staged = StagedDescription(lambda k: [(k, k)], "rising")
        result = bl_finite(staged, MetricSpace(1), horizon=8, dimension_bound=2)
        assert not result
        assert result.witness["dimension"] == 8
