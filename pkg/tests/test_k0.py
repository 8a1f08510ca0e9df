"""Tests for K_0 presentations, the built-in categories and relative groups."""

import pytest

from controlled_modules.constants import CATEGORY_COLORED_SETS, CATEGORY_ZAKHAREVICH, SUB_EQUAL_AC
from controlled_modules.control import MetricSpace
from controlled_modules.exceptions import ComplementError, K0Error
from controlled_modules.homotopy import identity_witness, isomorphism_witness
from controlled_modules.k0 import (
    AbelianGroupNF,
    CofiberData,
    ControlledCategory,
    FinWaldhausenDesc,
    K0Presentation,
    ObjectEquivalence,
    builtin_category,
    cofinality,
    from_json,
    generate_colored_sets,
    generate_zakharevich,
    k0,
    k0_controlled,
    k0_split,
    relative_groups,
    stability_report,
    strict_cofinality,
)
from controlled_modules.modules import CellularModule, ModuleMap, point_module
from controlled_modules.rings import IntegerRing

Z = IntegerRing()


class TestAbelianGroups:
    """Tests for normal forms of finitely generated abelian groups."""

    @pytest.mark.parametrize(
        "group, text",
        [
            (AbelianGroupNF(0), "0"),
            (AbelianGroupNF(1), "Z"),
            (AbelianGroupNF(2), "Z^2"),
            (AbelianGroupNF(0, (2,)), "Z/2"),
            (AbelianGroupNF(1, (2, 4)), "Z + Z/2 + Z/4"),
        ],
    )
    def test_str(self, group, text):
        assert str(group) == text

    def test_order(self):
        assert AbelianGroupNF(0, (2, 6)).order == 12
        assert AbelianGroupNF(1).order is None
        assert AbelianGroupNF(0).is_trivial

    def test_divisibility_chain(self):
        with pytest.raises(K0Error):
            AbelianGroupNF(0, (2, 3))

    def test_json(self):
        group = AbelianGroupNF(1, (3,))
        assert AbelianGroupNF.from_json(group.to_json()) == group


class TestPresentation:
    """Tests for presentations on named generators."""

    def test_sum_relation(self):
        p = K0Presentation(["x", "y"])
        p.add_sum(("x", "x"), "y")
        assert p.group() == AbelianGroupNF(1)

    def test_torsion(self):
        p = K0Presentation(["x"])
        p.add_relation({"x": 6})
        assert p.group() == AbelianGroupNF(0, (6,))

    def test_equal_and_zero(self):
        p = K0Presentation(["x", "y", "z"])
        p.add_equal("x", "y")
        p.add_zero("z")
        assert p.group() == AbelianGroupNF(1)

    def test_unknown_generator(self):
        with pytest.raises(K0Error):
            K0Presentation(["x"]).add_relation({"w": 1})

    def test_reduce_keeps_the_group(self):
        p = K0Presentation(["x", "y", "z"])
        p.add_sum(("x", "y"), "z")
        p.add_relation({"x": 2, "y": 4})
        reduced = p.reduce()
        assert reduced.group() == p.group()
        assert len(reduced.generators) < 3


class TestDescriptions:
    """Tests for finite category descriptions."""

    def test_unknown_reference(self):
        desc = FinWaldhausenDesc("bad", ["a"], isomorphisms=[("a", "b")])
        with pytest.raises(K0Error):
            desc.validate()

    def test_duplicate_objects(self):
        with pytest.raises(K0Error):
            FinWaldhausenDesc("bad", ["a", "a"]).validate()

    def test_from_json(self):
        desc = from_json(
            {"name": "pair", "objects": ["0", "a", "b"], "zero": "0", "isomorphisms": [["a", "b"]]}
        )
        assert desc.zero == "0"
        assert k0(desc) == AbelianGroupNF(1)

    def test_from_json_needs_objects(self):
        with pytest.raises(K0Error):
            from_json({"name": "empty"})

    def test_from_json_entry_width(self):
        with pytest.raises(K0Error):
            from_json({"objects": ["a", "b"], "coproducts": [["a", "b"]]})

    def test_json_round_trip(self):
        desc = generate_colored_sets(1)
        assert from_json(desc.to_json()) == desc


class TestColoredSets:
    """Tests for the colored pointed sets."""

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_ambient(self, s):
        assert k0(generate_colored_sets(s)) == AbelianGroupNF(1)

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_equal_ac(self, s):
        assert k0(generate_colored_sets(s, SUB_EQUAL_AC)) == AbelianGroupNF(2)

    def test_split_ignores_weak_equivalences(self):
        assert k0_split(generate_colored_sets(1)) == AbelianGroupNF(3)

    def test_empty_truncation(self):
        assert k0(generate_colored_sets(0)).is_trivial

    def test_negative_size(self):
        with pytest.raises(K0Error):
            generate_colored_sets(-1)

    def test_unknown_subcategory(self):
        with pytest.raises(K0Error):
            generate_colored_sets(1, "equal-AB")

    def test_cofinal_but_not_strictly(self):
        amb = generate_colored_sets(2)
        sub = generate_colored_sets(2, SUB_EQUAL_AC)
        assert cofinality(sub, amb).holds
        strict = strict_cofinality(sub, amb)
        assert not strict.holds
        assert "not strictly cofinal" in strict.describe()

    @pytest.mark.parametrize("s", [2, 3])
    def test_relative_groups(self, s):
        result = relative_groups(generate_colored_sets(s, SUB_EQUAL_AC), generate_colored_sets(s))
        assert result.sub == AbelianGroupNF(2)
        assert result.ambient == AbelianGroupNF(1)
        assert result.quotient.is_trivial
        assert result.split_quotient == AbelianGroupNF(1)
        assert not result.isomorphic
        assert result.surjective
        assert not result.injective
        assert not result.weq_redundant
        assert result.hypotheses == {
            "saturated": False,
            "extension_closed": True,
            "cofinal": True,
            "full": True,
        }
        assert not result.hypotheses_hold

    def test_bad_complement(self):
        amb = generate_colored_sets(1)
        sub = generate_colored_sets(1, SUB_EQUAL_AC)
        with pytest.raises(ComplementError) as exc_info:
            relative_groups(sub, amb, complements={(1, 0, 0): (0, 0, 0)})
        assert exc_info.value.obj == (1, 0, 0)

    def test_declared_cofinal(self):
        amb = generate_colored_sets(1)
        sub = amb.restrict([(0, 0, 0)], name="zero")
        assert not cofinality(sub, amb).holds
        with pytest.raises(ComplementError):
            relative_groups(sub, amb, declared_cofinal=True)


class TestZakharevich:
    """Tests for the pairs of pointed sets and the non-full subcategory."""

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_groups(self, s):
        sub, amb = generate_zakharevich(s)
        assert k0(sub) == AbelianGroupNF(2)
        assert k0(amb) == AbelianGroupNF(1)

    @pytest.mark.parametrize("s", [2, 3])
    def test_relative_groups(self, s):
        sub, amb = generate_zakharevich(s)
        result = relative_groups(sub, amb)
        assert result.quotient.is_trivial
        assert result.split_quotient.is_trivial
        assert result.isomorphic
        assert not result.hypotheses["full"]
        assert result.hypotheses["saturated"]
        assert result.hypotheses["cofinal"]


class TestBuiltins:
    """Tests for lookup by name and the stability report."""

    def test_lookup(self):
        assert builtin_category(CATEGORY_ZAKHAREVICH, 1, "B").full is False
        assert builtin_category(CATEGORY_ZAKHAREVICH, 1).full is True

    def test_unknown_category(self):
        with pytest.raises(K0Error):
            builtin_category("spheres", 1)

    def test_stability(self):
        report = stability_report(CATEGORY_COLORED_SETS, (1, 2))
        assert report.stable
        assert report.to_json()["groups"] == [{"rank": 1, "torsion": []}] * 2


def two_points():
    return CellularModule(Z).attach_cell("x", 0).attach_cell("y", 0)


class TestControlledCategory:
    """Tests for K_0 of small categories of controlled modules."""

    @pytest.fixture
    def objects(self):
        return {
            "0": CellularModule(Z),
            "P": point_module(Z),
            "Q": point_module(Z, "q"),
            "PP": two_points(),
        }

    @staticmethod
    def cofiber_sequence(objects):
        P, PP = objects["P"], objects["PP"]
        inclusion = ModuleMap(P, PP, {"*": PP.top("x")})
        projection = ModuleMap(PP, P, {"x": P.zero(0), "y": P.top("*")})
        return CofiberData("P", "PP", "P", inclusion, projection)

    @staticmethod
    def equivalence(objects):
        P, Q = objects["P"], objects["Q"]
        f = ModuleMap(P, Q, {"*": Q.top("q")})
        g = ModuleMap(Q, P, {"q": P.top("*")})
        return ObjectEquivalence("P", "Q", isomorphism_witness(f, g))

    def test_without_equivalences(self, objects):
        category = ControlledCategory(objects, cofiber_sequences=[self.cofiber_sequence(objects)], zero="0")
        assert k0_controlled(category) == AbelianGroupNF(2)

    def test_with_equivalence(self, objects):
        category = ControlledCategory(
            objects,
            equivalences=[self.equivalence(objects)],
            cofiber_sequences=[self.cofiber_sequence(objects)],
            zero="0",
        )
        assert k0_controlled(category) == AbelianGroupNF(1)
        assert k0_controlled(category, truncation=1) == AbelianGroupNF(1)

    def test_zero_object_must_be_empty(self, objects):
        with pytest.raises(K0Error):
            k0_controlled(ControlledCategory(objects, zero="P"))

    def test_witness_between_wrong_objects(self, objects):
        eq = ObjectEquivalence("P", "Q", identity_witness(objects["P"]))
        with pytest.raises(K0Error):
            k0_controlled(ControlledCategory(objects, equivalences=[eq], zero="0"))

    def test_projection_must_kill_the_image(self, objects):
        seq = self.cofiber_sequence(objects)
        P, PP = objects["P"], objects["PP"]
        seq.projection = ModuleMap(PP, P, {"x": P.top("*"), "y": P.top("*")})
        with pytest.raises(K0Error):
            k0_controlled(ControlledCategory(objects, cofiber_sequences=[seq], zero="0"))

    def test_uncontrolled_object(self):
        space = MetricSpace(1)
        M = CellularModule(Z).attach_cell("a", 0, (), "0").attach_cell("b", 0, (), "1")
        M = M.attach_cell("e", 1, (M.top("b"), M.top("a")), "1/2")
        category = ControlledCategory(
            {"0": CellularModule(Z), "L": M}, zero="0", space=space, condition=space.condition("1/4")
        )
        with pytest.raises(K0Error):
            k0_controlled(category)
        category.condition = space.condition("1/2")
        assert k0_controlled(category) == AbelianGroupNF(1)
