"""Campaign assembly, exact-sequence reports, claim table."""

import numpy as np
import pytest

from cubicmonodromy import forms as F
from cubicmonodromy import monodromy as M
from cubicmonodromy import perms as P
from cubicmonodromy import schlafli as S


def test_claim_suite_table():
    suite = M.claim_suite()
    ids = [c.claim_id for c in suite]
    assert ids == ["W(E6)", "S4-coarse", "S4-stack", "S3-coarse", "S3-stack",
                   "S3xC2-coarse", "S3xC2-stack", "C2-stack", "C2-coarse",
                   "flexes"]
    orders = sorted(c.target_order for c in suite)
    assert orders == sorted([51840, 4, 96, 36, 216, 12, 144, 1152, 576, 216])
    for claim in suite:
        data = claim.to_json()
        assert data["claim_id"] == claim.claim_id


def test_claims_s3_coarse_and_s3xc2_coarse_targets():
    by_id = {c.claim_id: c for c in M.claim_suite()}
    assert by_id["S3-coarse"].target_order == 36
    assert by_id["S3-coarse"].fingerprint_oracle == "S3xS3"
    assert by_id["S3xC2-coarse"].target_order == 12
    assert by_id["W(E6)"].target_order == 51840


def test_campaign_requires_positive_budget():
    with pytest.raises(M.CampaignError):
        M.Campaign(family=F.s4_family(), basepoint=[0.6 + 0.8j], loop_budget=0)


def test_exact_sequence_direct_product_oracle():
    big = P.named_group("S4xC2xC2")
    deck_gens = [g for g in big.generators[:2]]  # the S4 part on points 0..3
    deck = P.generate_group(deck_gens, degree=8)
    assert deck.order == 24
    tracked = P.generate_group(big.generators[2:], degree=8)
    seq = M.exact_sequence_report(big, deck, tracked=tracked)
    assert seq.deck_normal
    assert seq.quotient_order == 4
    assert seq.split == "direct_product"


def test_exact_sequence_trivial_quotient():
    g = P.named_group("S4")
    seq = M.exact_sequence_report(g, g, tracked=P.generate_group([], degree=4))
    assert seq.deck_normal and seq.quotient_order == 1


def test_exact_sequence_nonsplit_central():
    w = S.weyl_e6()
    go = P.set_stabilizer(w, S.tritangent_triples()[0])
    center = P.centralizer(go, go)
    zsub = P.generate_group(
        [next(g for g in center.elements() if g.order() == 2)], degree=27)
    seq = M.exact_sequence_report(go, zsub, tracked=go)
    assert seq.deck_normal
    assert seq.quotient_order == 576
    assert seq.split == "nonsplit_by_order8"


def test_exact_sequence_detects_non_normal():
    s4 = P.named_group("S4")
    sub = P.generate_group([P.from_cycles(4, [(0, 1)])])
    seq = M.exact_sequence_report(s4, sub)
    assert not seq.deck_normal and seq.split == "not_normal"


@pytest.fixture(scope="module")
def s4_report():
    campaign = M.Campaign(family=F.s4_family(),
                          basepoint=M.default_basepoint("S4", 0),
                          loop_budget=16, seed=3)
    return M.run_campaign(campaign)


def test_s4_campaign_groups(s4_report):
    assert s4_report.group.order == 4
    assert s4_report.deck_group.order == 24
    assert s4_report.combined_group.order == 96
    assert s4_report.plateau_reached


def test_s4_campaign_membership_invariants(s4_report):
    # every tracked generator lies in W(E6) and centralizes the deck
    for tp in s4_report.tracked:
        assert S.is_graph_automorphism(tp.perm)
        for d in s4_report.deck_group.generators:
            assert P.compose(tp.perm, d) == P.compose(d, tp.perm)
    # containment chain: tracked <= Z(deck, W), combined <= N(deck, W)
    w = S.weyl_e6()
    zdeck = P.centralizer(w, s4_report.deck_group)
    ndeck = P.normalizer(w, s4_report.deck_group)
    assert s4_report.group.is_subgroup_of(zdeck)
    assert s4_report.combined_group.is_subgroup_of(ndeck)


def test_monotone_group_growth(s4_report):
    # group order is non-decreasing as loops accumulate
    chain = P.StabilizerChain(27)
    orders = []
    for tp in s4_report.tracked:
        chain.extend(np.array(tp.perm.images))
        orders.append(chain.order())
    assert orders == sorted(orders)


def test_report_json_roundtrippable(s4_report):
    data = s4_report.to_json()
    assert data["schema"] == "cubicmonodromy/report/1"
    assert data["group"]["order"] == 4
    assert data["plateau_reached"] is True
    import json
    json.dumps(data)  # fully serializable


def test_generic20_basepoint_independence():
    # Cor. on open restrictions: campaigns at two basepoints agree up to
    # conjugacy in W(E6) (here: both reach the full group)
    fam = F.generic20_family()
    groups = []
    for seed in (101, 202):
        campaign = M.Campaign(family=fam,
                              basepoint=M.default_basepoint("Generic20", seed),
                              loop_budget=30, seed=seed)
        report = M.run_campaign(campaign)
        assert report.plateau_reached
        groups.append(report.group)
    assert groups[0].order == groups[1].order == 51840
    assert P.are_conjugate_subgroups(S.weyl_e6(), groups[0], groups[1])
