"""Tests for intervals, long homotopies, telescopes and split idempotents."""

import random

import pytest

from controlled_modules.config import Config, reset_config
from controlled_modules.constants import ENV_TRUNCATION
from controlled_modules.exceptions import (
    IntervalError,
    ModuleError,
    TelescopeError,
    TruncationError,
    WitnessError,
)
from controlled_modules.homotopy import Homotopy, projection, relative_horn_fill, square, trivial, vertex_inclusion
from controlled_modules.modules import (
    CellularModule,
    ModuleMap,
    identity_map,
    point_module,
    random_module,
    submodule,
    tensor_sset,
    zero_map,
)
from controlled_modules.rings import IntegerRing
from controlled_modules.simplicial import horn, standard_simplex
from controlled_modules.telescope import (
    Interval,
    LongHomotopy,
    LongHomotopy2,
    Telescope,
    box_compose,
    coherence_check,
    collapse_cylinder_map,
    coherent_from_domination,
    compress_homotopy,
    compress_interval,
    concat_homotopies,
    concat_intervals,
    concat_inverse_nullhomotopy,
    convergent_limit,
    extract_homotopy,
    homotopy_criterion,
    idempotent_identity_homotopy,
    idempotent_retraction,
    induced_cylinder_map,
    induced_telescope_map,
    interval,
    inverse_homotopy,
    mapping_cylinder_long,
    ordered,
    resolve_truncation,
    retraction_homotopy,
    reverse_interval,
    shift_homotopy,
    split_idempotent,
    stack_squares,
    strict_coherence,
    sweep,
    telescope,
    telescope_id_retract,
    telescope_identity_iso,
    telescope_self_map,
    trivial_long,
)

Z = IntegerRing()


def edge_module():
    M = CellularModule(Z).attach_cell("a", 0).attach_cell("b", 0)
    return M.attach_cell("e", 1, (M.top("b"), M.top("a")))


def point_to(M, name):
    P = point_module(Z)
    return ModuleMap(P, M, {"*": M.top(name)})


def path_homotopy(M):
    """The homotopy from a to b that runs along e."""
    P = point_module(Z)
    PX = tensor_sset(P, standard_simplex(1))
    values = {(0,): M.top("a"), (1,): M.top("b"), (0, 1): M.top("e")}
    return Homotopy(ModuleMap(PX, M, {name: values[name[1]] for name in PX.cells}))


def two_points():
    """K = {x, y} with the idempotent keeping x and killing y."""
    K = CellularModule(Z).attach_cell("x", 0).attach_cell("y", 0)
    e = ModuleMap(K, K, {"x": K.top("x"), "y": K.zero(0)})
    return K, e


def along_edge(M, edge):
    """The homotopy of a point map that runs along an edge of M."""
    P = point_module(Z)
    PX = tensor_sset(P, standard_simplex(1))
    e = M.top(edge)
    values = {(0,): M.face(e, 1), (1,): M.face(e, 0), (0, 1): e}
    return Homotopy(ModuleMap(PX, M, {name: values[name[1]] for name in PX.cells}))


def swap_homotopy():
    """A homotopy H from a map eta swapping a and b to the identity.

    a runs back along e and b along e; the filler fixes eta on e itself.
    eta.eta is the identity on vertices, so eta is not strictly idempotent.
    """
    M = edge_module()
    sub, inclusion = submodule(M, ["a", "b"])
    SX = tensor_sset(sub, standard_simplex(1))
    back = M.linear(1, [
        (-1, M.top("e")),
        (1, M.degeneracy(M.top("a"), 0)),
        (1, M.degeneracy(M.top("b"), 0)),
    ])
    paths = {
        "a": {(0,): M.top("b"), (1,): M.top("a"), (0, 1): back},
        "b": {(0,): M.top("a"), (1,): M.top("b"), (0, 1): M.top("e")},
    }
    g = ModuleMap(SX, M, {name: paths[name[0]][name[1]] for name in SX.cells})
    ML = tensor_sset(M, horn(1, 1))
    h = ModuleMap(ML, M, {name: M.apply(M.top(name[0]), name[2]) for name in ML.cells})
    return M, Homotopy(relative_horn_fill(inclusion, g, h, 1, 1).map)


def moving_in_turn():
    """x then y move along e, each while the other stays put."""
    T = edge_module()
    K = CellularModule(Z).attach_cell("x", 0).attach_cell("y", 0)
    KX = tensor_sset(K, standard_simplex(1))
    moving = {(0,): T.top("a"), (1,): T.top("b"), (0, 1): T.top("e")}

    def still(v):
        return {(0,): T.top(v), (1,): T.top(v), (0, 1): T.degeneracy(T.top(v), 0)}

    first = {"x": moving, "y": still("a")}
    second = {"x": still("b"), "y": moving}
    pieces = [
        Homotopy(ModuleMap(KX, T, {name: values[name[0]][name[1]] for name in KX.cells}))
        for values in (first, second)
    ]
    return LongHomotopy.from_pieces(ordered(2), pieces)


class TestIntervals:
    """Tests for parsing and combining intervals."""

    def test_parse(self):
        I = interval("fwd,bwd,fwd")
        assert len(I) == 3
        assert str(I) == "fwd,bwd,fwd"
        assert I.end == 3
        assert not I.is_ordered

    def test_aliases_and_base(self):
        I = interval("->, <-", base=2)
        assert str(I) == "fwd,bwd"
        assert list(I.labels) == [2, 3, 4]

    def test_point(self):
        assert str(interval("")) == "point"
        assert len(Interval()) == 0

    def test_unknown_token(self):
        with pytest.raises(IntervalError):
            interval("fwd,sideways")

    def test_edges(self):
        I = interval("fwd,bwd")
        assert I.edge(0) == (0, 1)
        assert I.edge(1) == (2, 1)
        with pytest.raises(IntervalError):
            I.edge(2)
        with pytest.raises(IntervalError):
            I.vertex(3)

    def test_reverse_and_concat(self):
        assert str(reverse_interval(interval("fwd,fwd,bwd"))) == "fwd,bwd,bwd"
        assert concat_intervals(ordered(1), interval("bwd")) == interval("fwd,bwd")

    def test_standard_edge(self):
        assert ordered(1).sset is standard_simplex(1)


class TestLongHomotopies:
    """Tests for homotopies over simplicial intervals."""

    def test_trivial(self):
        f = point_to(edge_module(), "a")
        trivial_long(f, interval("fwd,bwd")).verify(f, f, rel=["*"])

    def test_from_pieces(self):
        M = edge_module()
        H = path_homotopy(M)
        L = LongHomotopy.from_pieces(interval("fwd,bwd"), [H, H])
        a = point_to(M, "a")
        L.verify(a, a)
        assert L.at(1) == point_to(M, "b")

    def test_wrong_number_of_pieces(self):
        H = path_homotopy(edge_module())
        with pytest.raises(IntervalError):
            LongHomotopy.from_pieces(interval("fwd,fwd"), [H])

    def test_concat_is_associative(self):
        M = edge_module()
        H = path_homotopy(M)
        there = LongHomotopy.from_pieces(ordered(1), [H])
        back = inverse_homotopy(there)
        stay = trivial_long(point_to(M, "a"), interval("bwd"))
        left = concat_homotopies(concat_homotopies(there, back), stay)
        right = concat_homotopies(there, concat_homotopies(back, stay))
        assert left.interval == right.interval
        assert left.carrier == right.carrier

    def test_point_is_a_unit(self):
        M = edge_module()
        there = LongHomotopy.from_pieces(ordered(1), [path_homotopy(M)])
        unit = trivial_long(there.end, Interval())
        assert concat_homotopies(there, unit).carrier == there.carrier

    def test_concat_mismatch(self):
        there = LongHomotopy.from_pieces(ordered(1), [path_homotopy(edge_module())])
        with pytest.raises(WitnessError):
            concat_homotopies(there, there)

    def test_inverse(self):
        M = edge_module()
        there = LongHomotopy.from_pieces(ordered(1), [path_homotopy(M)])
        inverse_homotopy(there).verify(point_to(M, "b"), point_to(M, "a"))

    def test_compress(self):
        M = edge_module()
        H = path_homotopy(M)
        L = LongHomotopy.from_pieces(interval("fwd,bwd,fwd"), [H, H, H])
        compress_homotopy(L).verify(point_to(M, "a"), point_to(M, "b"))

    def test_nullhomotopy(self):
        there = LongHomotopy.from_pieces(ordered(1), [path_homotopy(edge_module())])
        G = concat_inverse_nullhomotopy(there)
        assert isinstance(G, LongHomotopy2)
        assert str(G.rows) == "fwd,bwd"


class TestCompression:
    """Tests for sweeping and compressing intervals."""

    def test_sweep(self):
        P = point_module(Z)
        H = sweep(P, interval("fwd,bwd"))
        assert H.target is tensor_sset(P, interval("fwd,bwd").sset)

    @pytest.mark.parametrize("word", ["fwd", "bwd", "bwd,fwd", "fwd,bwd,bwd"])
    def test_compress_interval(self, word):
        P = point_module(Z)
        w = compress_interval(P, interval(word))
        w.verify()

    def test_compress_point(self):
        with pytest.raises(IntervalError):
            compress_interval(point_module(Z), Interval())

    @pytest.mark.parametrize("word", ["fwd,fwd", "bwd,fwd", "bwd,bwd", "fwd,bwd,fwd"])
    def test_compress_interval_keeps_ends(self, word):
        """The inverse keeps both ends of I; the witness homotopies may move them."""
        M = edge_module()
        I = interval(word)
        w = compress_interval(M, I).verify()
        short = w.forward.target.sset
        for v, label in (((0,), I.base), ((1,), I.end)):
            image = w.inverse.compose(vertex_inclusion(M, short, v))
            assert image == vertex_inclusion(M, I.sset, I.vertex(label))

    def test_convergent_limit(self):
        H = moving_in_turn()
        G = convergent_limit(H, [{"x"}, {"x", "y"}], [1, 2])
        G.verify(H.start, H.end)

    def test_convergent_limit_settled_stage_moves(self):
        with pytest.raises(TelescopeError):
            convergent_limit(moving_in_turn(), [{"x"}, {"x", "y"}], [0, 2])

    def test_convergent_limit_needs_order(self):
        M = edge_module()
        H = path_homotopy(M)
        L = LongHomotopy.from_pieces(interval("fwd,bwd"), [H, H])
        with pytest.raises(IntervalError):
            convergent_limit(L, [{"*"}], [0])

    def test_convergent_limit_needs_exhaustion(self):
        H = trivial_long(identity_map(edge_module()), ordered(2))
        with pytest.raises(TelescopeError):
            convergent_limit(H, [{"a"}], [0])


class TestTelescope:
    """Tests for truncated mapping telescopes."""

    @pytest.fixture
    def tel(self):
        P = point_module(Z)
        return Telescope(identity_map(P), ordered(1), 2)

    def test_cells(self, tel):
        assert len(tel.module) == 5
        assert [k for k, _ in tel.module.cells].count(2) == 1

    def test_front_and_stage_bounds(self, tel):
        tel.front(2).check()
        tel.stage_map(1).check()
        with pytest.raises(TruncationError):
            tel.front(3)
        with pytest.raises(TruncationError):
            tel.stage_map(2)

    def test_rejects_bad_input(self):
        K, e = two_points()
        with pytest.raises(IntervalError):
            Telescope(e, Interval(), 1)
        with pytest.raises(TruncationError):
            Telescope(e, ordered(1), -1)
        with pytest.raises(ModuleError):
            Telescope(point_to(edge_module(), "a"), ordered(1), 1)

    def test_extend_and_shift(self, tel):
        assert tel.extend(3) is tel.extend(3)
        tel.inclusion(3).check()
        tel.shift().check()
        with pytest.raises(TruncationError):
            tel.inclusion(1)

    def test_default_truncation(self, monkeypatch, tmp_path):
        monkeypatch.delenv(ENV_TRUNCATION, raising=False)
        monkeypatch.setattr(Config, "CONFIG_FILE", tmp_path / "missing.yaml")
        reset_config()
        try:
            assert resolve_truncation(None, 2) == 5
        finally:
            reset_config()
        with pytest.raises(TruncationError):
            resolve_truncation(0)
        K, e = two_points()
        assert telescope(e, N=1).N == 1

    def test_identity_is_an_interval(self, tel):
        forward, backward = telescope_identity_iso(tel)
        assert backward.compose(forward) == identity_map(tel.module)
        assert forward.compose(backward) == identity_map(forward.target)

    def test_identity_iso_needs_identity(self):
        K, e = two_points()
        with pytest.raises(TelescopeError):
            telescope_identity_iso(Telescope(e, ordered(1), 1))

    def test_identity_retract(self):
        data = telescope_id_retract(point_module(Z), 2)
        assert data.retraction.compose(data.inclusion) == identity_map(data.inclusion.source)

    def test_self_map_of_identity(self, tel):
        assert telescope_self_map(tel) == identity_map(tel.module)

    def test_shift_homotopy(self, tel):
        shift_homotopy(tel)
        K, e = two_points()
        shift_homotopy(Telescope(e, ordered(1), 1))

    def test_shift_homotopy_needs_single_edge(self):
        P = point_module(Z)
        with pytest.raises(IntervalError):
            shift_homotopy(Telescope(identity_map(P), ordered(2), 1))


class TestLongMappingCylinders:
    """Tests for mapping cylinders over zig-zag intervals."""

    @pytest.mark.parametrize("word", ["fwd", "fwd,bwd", "bwd,fwd,fwd"])
    def test_triangle(self, word):
        f = point_to(edge_module(), "a")
        cyl = mapping_cylinder_long(f, interval(word))
        assert cyl.projection.compose(cyl.front) == f
        assert cyl.projection.compose(cyl.back) == identity_map(f.target)

    def test_collapse(self):
        f = point_to(edge_module(), "a")
        J, I = ordered(1), interval("bwd")
        collapse = collapse_cylinder_map(f, J, I)
        longer = mapping_cylinder_long(f, concat_intervals(J, I))
        shorter = mapping_cylinder_long(f, J)
        assert collapse.compose(longer.front) == shorter.front
        assert collapse.compose(longer.back) == shorter.back


class TestInducedMaps:
    """Tests for maps induced by homotopy commutative squares."""

    def test_cylinder_map(self):
        P = point_module(Z)
        ident = identity_map(P)
        H = trivial_long(ident, ordered(1))
        induced = induced_cylinder_map(ident, ident, ident, ident, H, ordered(1))
        assert extract_homotopy(induced).carrier == H.carrier

    def test_telescope_map(self):
        P = point_module(Z)
        ident = identity_map(P)
        H = trivial_long(ident, ordered(1))
        induced = induced_telescope_map(ident, ident, ident, H, N=1)
        assert extract_homotopy(induced).carrier == H.carrier

    def test_square_must_start_at_g_a(self):
        K, e = two_points()
        ident = identity_map(K)
        with pytest.raises(WitnessError):
            induced_telescope_map(e, ident, ident, trivial_long(ident, ordered(1)), N=1)

    def test_box_compose_needs_matching_intervals(self):
        P = point_module(Z)
        ident = identity_map(P)
        H = trivial_long(ident, ordered(1))
        outer = induced_telescope_map(ident, ident, ident, H, N=1)
        with pytest.raises(IntervalError):
            box_compose(outer, outer)

    @pytest.mark.parametrize("seed", range(4))
    def test_box_compose_is_the_stacked_square(self, seed):
        rng = random.Random(seed)
        M = random_module(Z, rng, vertices=3, edges=2, triangles=0)
        loop_at = along_edge(M, rng.choice(["e0", "e1"]))
        Ha = LongHomotopy.from_pieces(interval("fwd,bwd"), [loop_at, loop_at])
        a = Ha.start
        Hb = trivial_long(identity_map(M), ordered(1))
        b = identity_map(M)
        f = identity_map(a.source)
        J = ordered(1)
        outer = induced_telescope_map(b, b, b, Hb, J=J, N=1)
        inner = induced_telescope_map(f, b, a, Ha, J=concat_intervals(J, Hb.interval), N=1)
        ba, stacked = stack_squares(Hb, b, Ha, a)
        direct = induced_telescope_map(f, b, ba, stacked, J=J, N=1)
        assert box_compose(outer, inner) == direct.map

    def test_homotopy_criterion(self):
        P = point_module(Z)
        ident = identity_map(P)
        H = trivial_long(ident, ordered(1))
        first = induced_telescope_map(ident, ident, ident, H, N=1)
        second = induced_telescope_map(ident, ident, ident, H, N=1)
        G = LongHomotopy2(ordered(1), ordered(1), ident.compose(projection(P, square()[0])))
        criterion = homotopy_criterion(first, second, trivial(ident), G)
        assert criterion.start == first.map


class TestIdempotents:
    """Tests for coherence data and splitting idempotents."""

    def test_strict_coherence(self):
        K, e = two_points()
        strict_coherence(e)

    def test_wrong_coherence(self):
        K, e = two_points()
        G = zero_map(tensor_sset(K, square()[0]), K)
        assert not coherence_check(e, trivial(e), G)

    def test_coherence_from_domination(self):
        M = edge_module()
        i = point_to(M, "a")
        P = i.source
        s = P.degeneracy(P.top("*"), 0)
        p = ModuleMap(M, P, {"a": P.top("*"), "b": P.top("*"), "e": s})
        data = coherent_from_domination(i, p, trivial(identity_map(P)))
        assert data.map == i.compose(p)

    def test_retraction(self):
        K, e = two_points()
        tel = Telescope(e, ordered(1), 1)
        c = idempotent_retraction(tel)
        assert c.compose(tel.front_inclusion) == e
        assert e.compose(c) == c

    def test_retraction_homotopy(self):
        K, e = two_points()
        tel = Telescope(e, ordered(1), 1)
        H = retraction_homotopy(tel)
        assert H.end == tel.inclusion(2)

    def test_idempotent_identity_homotopy(self):
        K, e = two_points()
        tel = Telescope(e, ordered(1), 1)
        H = idempotent_identity_homotopy(tel)
        assert H.start == tel.inclusion(2).compose(telescope_self_map(tel))

    def test_split(self):
        K, e = two_points()
        result = split_idempotent(e, N=1)
        assert result.truncation == 1
        assert result.complement.map == identity_map(K).sub(e)
        assert result.equivalence.forward.source is K
        g, f = result.equivalence.inverse, result.equivalence.forward
        assert g.compose(result.summand_projection).compose(f) == e

    def test_split_identity(self):
        P = point_module(Z)
        result = split_idempotent(identity_map(P), N=1)
        result.verify()

    def test_not_idempotent(self):
        K, e = two_points()
        doubled = e.scale(2)
        with pytest.raises(TelescopeError):
            split_idempotent(doubled, N=1)

    def test_half_coherence(self):
        K, e = two_points()
        with pytest.raises(TelescopeError):
            split_idempotent(e, N=1, homotopy=trivial(e))

    def test_bad_truncation(self):
        K, e = two_points()
        with pytest.raises(TruncationError):
            split_idempotent(e, N=0)

    def test_split_strict_domination(self):
        M = edge_module()
        i = point_to(M, "a")
        P = i.source
        s = P.degeneracy(P.top("*"), 0)
        p = ModuleMap(M, P, {"a": P.top("*"), "b": P.top("*"), "e": s})
        data = coherent_from_domination(i, p, trivial(identity_map(P)))
        result = split_idempotent(data.map, N=1, homotopy=data.homotopy, coherence=data.coherence)
        assert result.strict
        assert result.retraction.compose(result.telescope.front_inclusion) == data.map


class TestHomotopyIdempotents:
    """Tests for idempotents that hold only up to homotopy."""

    @pytest.fixture
    def swap(self):
        M, H = swap_homotopy()
        return coherent_from_domination(identity_map(M), H.start, H)

    def test_swap_is_not_strict(self, swap):
        eta = swap.map
        assert eta.compose(eta) != eta
        swap.homotopy.verify(eta.compose(eta), eta)

    def test_retraction_needs_homotopy(self, swap):
        tel = Telescope(swap.map, ordered(1), 2)
        with pytest.raises(TelescopeError):
            idempotent_retraction(tel)
        with pytest.raises(TelescopeError):
            idempotent_identity_homotopy(tel)

    def test_retraction_along_homotopy(self, swap):
        tel = Telescope(swap.map, ordered(1), 2)
        c = idempotent_retraction(tel, swap.homotopy)
        assert c.compose(tel.front_inclusion) == swap.map

    def test_retraction_needs_single_edge(self, swap):
        tel = Telescope(swap.map, ordered(2), 2)
        with pytest.raises(IntervalError):
            idempotent_retraction(tel, swap.homotopy)

    def test_retraction_homotopy(self, swap):
        tel = Telescope(swap.map, ordered(1), 2)
        c = idempotent_retraction(tel, swap.homotopy)
        H = retraction_homotopy(tel, swap.homotopy)
        assert H.start == tel.extend(3).front(0).compose(c)
        assert H.end == tel.inclusion(3)

    def test_identity_homotopy(self, swap):
        tel = Telescope(swap.map, ordered(1), 1)
        H = idempotent_identity_homotopy(tel, swap.homotopy)
        assert H.start == tel.inclusion(2).compose(telescope_self_map(tel))
        assert H.end == tel.inclusion(2)

    def test_split(self, swap):
        eta = swap.map
        result = split_idempotent(eta, N=2, homotopy=swap.homotopy, coherence=swap.coherence)
        assert not result.strict
        assert result.truncation == 2
        assert result.complement.map == identity_map(eta.source).sub(eta)
        g, f = result.equivalence.inverse, result.equivalence.forward
        assert g.compose(result.summand_projection).compose(f) == eta
        assert result.retraction.compose(result.telescope.front_inclusion) == eta

    def test_split_rejects_broken_coherence(self, swap):
        G = zero_map(tensor_sset(swap.map.source, square()[0]), swap.map.source)
        with pytest.raises(WitnessError):
            split_idempotent(swap.map, N=2, homotopy=swap.homotopy, coherence=G)
