import json

import pytest

from grounded_chi.decomposition import (
    ClaimStepState,
    PiercingVerdict,
    _d_members_chi,
    Thresholds,
    audit_state,
    bracket_is_valid,
    check_cor_bracket,
    check_cor_clique,
    check_surround,
    claim_bootstrap,
    claim_step,
    externally_supported,
    find_bracket,
    int_of_clique,
    ladder_split,
    run_claim_chain,
    split_three,
    supporters,
    write_provenance,
)
from grounded_chi.errors import (
    AuditFailure,
    BudgetExceeded,
    HypothesisViolated,
    InputOverlap,
    NoSupportedLayer,
    PreconditionFailed,
    RoutingFailed,
    StageError,
    StepInfeasible,
)
from grounded_chi.family_model import gen_clique, gen_clique_with_pockets, gen_pillars, juxtapose, make_family, subfamily
from grounded_chi.graph_core import compute_bounds
from grounded_chi.grid_topology import EMPTY, CellSet, Frame

from .conftest import column, gset, row

ENCLOSED = CellSet([(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)])

# leaves the arch through A at (1, 2), comes back down through B at (3, 2)
OVER_THE_ARCH = [(1, 0), (1, 1), (1, 2), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1)]


def test_ladder_on_chain(chain6):
    result = ladder_split(chain6, 0, 0)
    assert len(result.blocks) == 6
    assert result.parity == 0
    assert result.h.ids == ("X0", "X2", "X4")


def test_ladder_on_clique():
    result = ladder_split(gen_clique(4).family, 1, 0)
    assert result.h.ids == ("A", "C")
    assert result.audit["chi_h"] == 2
    assert result.audit["pairs"] == [{"pair": ["A", "C"], "chi_between": 1}]


def test_ladder_precondition(chain6):
    with pytest.raises(PreconditionFailed) as info:
        ladder_split(chain6, 1, 0)
    assert info.value.threshold == 2


def test_externally_supported_chain(chain6):
    layer = externally_supported(chain6, 0)
    assert layer.ids == ("X1",)
    assert supporters(layer, chain6) == {"X1": "X0"}


def test_externally_supported_single_vertex():
    F = make_family([gset("A", column(1, 0, 1))], Frame(3, 3))
    with pytest.raises(NoSupportedLayer):
        externally_supported(F, 0)


def test_externally_supported_picks_largest_component():
    F = juxtapose([gen_clique(3).family, gen_clique(2).family])
    layer = externally_supported(F, 1)
    assert layer.ids == ("F0.B", "F0.C")


def test_externally_supported_precondition(chain6):
    with pytest.raises(PreconditionFailed):
        externally_supported(chain6, 1)


def test_int_of_twin_arch(twin_arch):
    assert int_of_clique(twin_arch.members, twin_arch.frame) == ENCLOSED


def test_int_of_clique_adjacent_bases():
    a = gset("A", row(0, 0, 1), [(1, 1)])
    b = gset("B", [(2, 0), (2, 1), (1, 1)])
    assert int_of_clique([a, b], Frame(4, 3)) == EMPTY


def test_int_of_three_clique_first_gap():
    F = gen_clique(3).family
    assert int_of_clique(F.members, F.frame) == ENCLOSED


def test_find_bracket(bracket2):
    F = bracket2.family
    B = find_bracket(F, 2)
    assert B.clique_ids == ("A", "B")
    assert B.support.id == "S"
    assert B.side == "right"
    assert B.int_bracket == CellSet([(5, 0), (5, 1), (5, 2)])
    assert bracket_is_valid(B, F)


def test_find_bracket_none(chain6):
    assert find_bracket(chain6, 3) is None
    a, b = gen_clique(2).family.members
    F = make_family([a, b, gset("C", column(6, 0, 1))], Frame(8, 4))
    assert find_bracket(F, 2) is None


def test_cor_clique_rejects_member(twin_arch):
    a, b = twin_arch.members
    with pytest.raises(InputOverlap):
        check_cor_clique(a, [a, b], twin_arch.frame)


def test_cor_clique_inside_only_is_vacuous(twin_arch):
    x = gset("X", [(2, 0), (2, 1)])
    verdict = check_cor_clique(x, twin_arch.members, twin_arch.frame)
    assert not verdict.hypotheses
    assert verdict.holds


def test_cor_clique_over_the_arch(twin_arch):
    x = gset("X", OVER_THE_ARCH)
    verdict = check_cor_clique(x, twin_arch.members, Frame(7, 4))
    assert verdict.hypotheses and verdict.conclusion
    assert verdict.witness == ((1, 0), (3, 1))
    pinned = check_cor_clique(x, twin_arch.members, Frame(7, 4), cells=((1, 0), (1, 1)))
    assert not pinned.hypotheses


def test_cor_bracket(bracket2):
    B = find_bracket(bracket2.family, 2)
    f = bracket2.family.frame
    inside = check_cor_bracket(gset("X", [(5, 0), (5, 1)]), B, f)
    assert not inside.hypotheses and inside.holds
    crossing = gset("X", column(5, 0, 2), row(2, 1, 4), [(1, 3)])
    verdict = check_cor_bracket(crossing, B, f)
    assert verdict.hypotheses and verdict.conclusion
    with pytest.raises(InputOverlap):
        check_cor_bracket(B.support, B, f)


def test_surround(twin_arch):
    a, b = twin_arch.members
    z = gset("Z", OVER_THE_ARCH)
    verdict = check_surround(z, a, b, Frame(7, 4))
    assert verdict.hypotheses and verdict.holds
    disjoint = check_surround(z, a, gset("C", column(6, 0, 1)), Frame(7, 4))
    assert disjoint == PiercingVerdict(False, True)


def test_thresholds_defaults():
    thr = Thresholds.from_bounds(compute_bounds(2), 2)
    assert [thr.delta_at(j) for j in (0, 1, 2)] == [90, 30, 0]
    assert thr.bootstrap_b() == 92
    assert thr.remainder(0) == 194
    assert thr.split_chi(1) == 34
    assert (thr.step_a(), thr.step_b()) == (1, 2)


def test_thresholds_overrides():
    thr = Thresholds.from_bounds(compute_bounds(2), 2, {"delta": {0: 1}, "step_b": 0})
    assert thr.delta_at(0) == 1
    assert thr.delta_at(1) == 30
    assert thr.step_b() == 0


def test_thresholds_need_k2():
    with pytest.raises(StepInfeasible):
        Thresholds.from_bounds(compute_bounds(2), 1)


def test_split_three(chain6):
    X, Y, Z = split_three(chain6, 2)
    assert X.ids == ("X0", "X1")
    assert Y.ids == ("X2", "X3")
    assert Z.ids == ("X4", "X5")
    with pytest.raises(StepInfeasible):
        split_three(chain6, 3)


def _pockets_bootstrap():
    F = gen_clique_with_pockets(5).family
    bounds = compute_bounds(5)
    return F, bounds, {"bootstrap_b": 1, "delta": {0: 1}}


def test_claim_bootstrap():
    F, bounds, overrides = _pockets_bootstrap()
    state = claim_bootstrap(F, F, 5, bounds, overrides)
    assert state.level == 0
    assert [m.id for m in state.scaffold] == ["C0", "C2"]
    assert state.working.ids == ("P0a", "P0b", "P1a", "P1b")
    assert [e["stage"] for e in state.log] == ["ladder", "scaffold", "audit"]


def test_claim_bootstrap_default_thresholds_are_infeasible():
    F = gen_clique_with_pockets(5).family
    with pytest.raises(StepInfeasible) as info:
        claim_bootstrap(F, F, 5, compute_bounds(5))
    assert info.value.stage == "precondition"


def test_claim_bootstrap_rejects_large_clique():
    F, bounds, overrides = _pockets_bootstrap()
    with pytest.raises(StepInfeasible, match="clique number"):
        claim_bootstrap(F, F, 4, compute_bounds(4), overrides)


STEP_OVERRIDES = {"delta": {0: 1, 1: 0}, "remainder": 0, "split_chi": 1, "step_a": 1, "step_b": 0}


def _step_state(F):
    working = subfamily(F, ["x", "y1", "y2", "y3", "y4", "y5", "w", "z"])
    return ClaimStepState(0, (F.by_id("H1"), F.by_id("H2")), working, ())


def test_claim_step(claim_step_family):
    F = claim_step_family
    state = claim_step(_step_state(F), F, F, 2, compute_bounds(2), STEP_OVERRIDES)
    assert state.level == 1
    assert [m.id for m in state.scaffold] == ["H1", "H2", "y1", "y5", "S1"]
    assert state.working.ids == ("z",)
    assert [s.id for s in state.supports] == ["S1"]
    by_stage = {e["stage"]: e for e in state.log}
    assert by_stage["dist2"]["method"] == "empty"
    assert by_stage["split"] == {"stage": "split", "x": ["x"], "y": ["y1", "y2", "y3", "y4", "y5", "w"], "z": ["z"]}
    assert by_stage["bracket"]["clique"] == ["y1", "y5"]
    assert by_stage["bracket"]["p"] == "y3"
    assert by_stage["bracket"]["side"] == "right"


def test_claim_step_precondition(claim_step_family):
    F = claim_step_family
    with pytest.raises(StepInfeasible) as info:
        claim_step(_step_state(F), F, F, 2, compute_bounds(2))
    assert info.value.stage == "precondition"


def test_audit_rejects_unsurrounded_working(claim_step_family):
    F = claim_step_family
    state = ClaimStepState(0, (F.by_id("y1"), F.by_id("y5")), subfamily(F, ["x", "z"]), ())
    with pytest.raises(AuditFailure):
        audit_state(state, F, Thresholds.from_bounds(compute_bounds(2), 2, STEP_OVERRIDES))


def test_run_claim_chain_and_provenance(tmp_path):
    F, bounds, overrides = _pockets_bootstrap()
    states, stopped = run_claim_chain([F], F, 5, bounds, overrides)
    assert stopped is None
    assert len(states) == 1
    path = write_provenance(states, tmp_path / "out" / "claims.jsonl")
    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert [e["stage"] for e in lines] == ["ladder", "scaffold", "audit"]
    assert lines[1]["scaffold"] == ["C0", "C2"]


def test_run_claim_chain_reports_stop():
    F = gen_clique_with_pockets(5).family
    states, stopped = run_claim_chain([F], F, 5, compute_bounds(5))
    assert states == []
    assert isinstance(stopped, StepInfeasible)


@pytest.fixture
def pillar_scene():
    scene = gen_pillars(2).scene
    D = make_family([gset("D1", [(2, 0), (2, 1), (3, 1), (4, 1)]),
                     gset("D2", [(8, 0), (8, 1), (7, 1), (6, 1)])], scene.frame)
    return scene, D


def test_d_members_chi_through_dist2(pillar_scene):
    scene, D = pillar_scene
    chi, method = _d_members_chi(scene.s, list(scene.pillars), D, 2, compute_bounds(2), scene.frame, None)
    assert method == "dist2"
    assert chi >= 1


def test_d_members_chi_propagates_hypothesis_violations(pillar_scene):
    scene, _ = pillar_scene
    stray = make_family([gset("D9", column(5, 0, 1))], scene.frame)
    with pytest.raises(HypothesisViolated, match="D9"):
        _d_members_chi(scene.s, list(scene.pillars), stray, 2, compute_bounds(2), scene.frame, None)


@pytest.mark.parametrize("exc", [
    StageError("attach", RoutingFailed(0, ["D1"])),
    StageError("rightclips", BudgetExceeded(10)),
    BudgetExceeded(10),
])
def test_d_members_chi_falls_back_on_refusals(monkeypatch, pillar_scene, exc):
    scene, D = pillar_scene

    def refuse(*args, **kwargs):
        raise exc
    monkeypatch.setattr("grounded_chi.dist2_pipeline.color_dist2", refuse)
    assert _d_members_chi(scene.s, list(scene.pillars), D, 2, compute_bounds(2), scene.frame, None) == (1, "exact")


def test_d_members_chi_propagates_audit_failures(monkeypatch, pillar_scene):
    scene, D = pillar_scene

    def broken(*args, **kwargs):
        raise StageError("final", AuditFailure("not a proper 4-coloring"))
    monkeypatch.setattr("grounded_chi.dist2_pipeline.color_dist2", broken)
    with pytest.raises(StageError) as info:
        _d_members_chi(scene.s, list(scene.pillars), D, 2, compute_bounds(2), scene.frame, None)
    assert info.value.exit_code == 1
