"""
Tests for surgery multiplicities, the family tables, certificates and realization.
"""

import pytest
from pydantic import ValidationError

from twistedtorus.classify import psf_report
from twistedtorus.exceptions import (
    InvalidParametersError,
    NotMiddleSeifertFiberedError,
    NotPrimitiveMiddleSfError,
    TripleNotRealizableError,
)
from twistedtorus.surgery import (
    TSV_COLUMNS,
    HomologyClass,
    MultiplicityResult,
    NonTorusCertificate,
    braid_euler_char,
    corrected_family4_mu3,
    enumerate_middle_psf,
    family_multiplicities,
    fiber_homology,
    knot_homology,
    moser_multiplicities,
    mu3,
    multiplicity_triple,
    nontorus_certificate,
    q_decompose,
    q_decompositions,
    realize_multiset,
    realize_triple,
    spherical_triples,
)
from twistedtorus.ttk import TtkParams


def _record(records, family, p, q, r, n):
    matches = [
        record
        for record in records
        if record.family == family and record.params.as_tuple() == (p, q, r, 1, n)
    ]
    assert len(matches) == 1, f"no unique family {family} record for {(p, q, r, n)}"
    return matches[0]


class TestHomology:
    def test_knot_class(self, k7231, k7231_negative):
        assert knot_homology(k7231) == HomologyClass(c1=3, c2=2)
        assert knot_homology(k7231_negative) == HomologyClass(c1=-3, c2=2)

    def test_r_zero(self):
        assert knot_homology(TtkParams(p=5, q=3, r=0)) == HomologyClass(c1=0, c2=3)

    def test_needs_unit_twist(self):
        with pytest.raises(InvalidParametersError):
            knot_homology(TtkParams(p=7, q=2, r=3, m=1, n=3))


class TestDecomposition:
    def test_p_minus_alpha_branch(self):
        d = q_decompose(7, 2, 3)
        assert (d.q_tilde, d.gamma, d.q_hat, d.r_bar, d.beta_tw, d.alpha) == (2, 0, 2, 3, 0, 2)
        assert d.branch == "p_minus_alpha_q_hat"

    def test_alpha_branch_with_negative_q_tilde(self):
        d = q_decompose(7, 5, 4)
        assert (d.q_tilde, d.gamma, d.q_hat, d.r_bar, d.beta_tw, d.alpha) == (-2, 1, 2, 4, 0, 2)
        assert d.branch == "alpha_q_hat"

    def test_large_alpha(self):
        d = q_decompose(23, 5, 3)
        assert (d.q_tilde, d.gamma, d.q_hat, d.alpha) == (5, 0, 5, 4)
        assert d.branch == "p_minus_alpha_q_hat"

    def test_both_branches_when_q_hat_is_one(self):
        branches = [d.branch for d in q_decompositions(7, 8, 10)]
        assert branches == ["p_minus_alpha_q_hat", "alpha_q_hat"]

    def test_alpha_one_flagged(self):
        assert q_decompose(7, 2, 5).alpha_is_one

    def test_multiple_of_p(self):
        with pytest.raises(NotMiddleSeifertFiberedError):
            q_decompose(7, 2, 7)

    def test_no_branch(self):
        with pytest.raises(NotMiddleSeifertFiberedError):
            q_decompose(7, 3, 2)


class TestFiberHomology:
    def test_positive_q_tilde(self):
        assert fiber_homology(7, 2, 3, 1) == HomologyClass(c1=-1, c2=1)

    def test_negative_q_tilde(self):
        assert fiber_homology(7, 5, 4, 1) == HomologyClass(c1=1, c2=2)

    def test_negative_twist(self):
        assert fiber_homology(23, 5, 3, -1) == HomologyClass(c1=-1, c2=1)

    def test_eps_must_be_a_sign(self):
        with pytest.raises(InvalidParametersError):
            fiber_homology(7, 2, 3, 2)


class TestMultiplicities:
    def test_mu3(self, k7231, k7231_negative):
        assert mu3(k7231) == 5
        assert mu3(k7231_negative) == 1
        assert mu3(TtkParams(p=23, q=5, r=3, m=1, n=-1)) == 2

    def test_running_example(self, k7231):
        triple = multiplicity_triple(k7231)
        assert triple.mu == (2, 3, 5)
        assert triple.slope == 23
        assert triple.kind == "triple"

    @pytest.mark.parametrize(
        "p, expected",
        [(25, (10, 5, 7)), (33, (14, 5, 7))],
    )
    def test_large_p_examples(self, p, expected):
        assert multiplicity_triple(TtkParams(p=p, q=2, r=5)).mu == expected

    def test_slope_75(self):
        assert multiplicity_triple(TtkParams(p=25, q=2, r=5)).slope == 75

    def test_outside_not_primitive(self):
        with pytest.raises(NotPrimitiveMiddleSfError):
            multiplicity_triple(TtkParams(p=11, q=7, r=2))

    def test_connected_sum_kind(self):
        result = MultiplicityResult.build(2, 3, 0, slope=6)
        assert result.kind == "connected_sum"
        assert result.label() == "connected_sum"

    def test_kind_must_match_mu3(self):
        with pytest.raises(ValidationError):
            MultiplicityResult(kind="triple", mu1=2, mu2=3, mu3=0, slope=6)

    def test_absolute_values(self):
        assert MultiplicityResult.build(2, -3, -5, slope=1).mu == (2, 3, 5)


class TestEnumeration:
    def test_small_bound_contains_examples(self):
        records = enumerate_middle_psf(7)
        assert _record(records, 2, 7, 2, 3, 1).family_params == {"k": 2}
        assert _record(records, 3, 7, 5, 4, -1).family_params == {"l": 2, "s": 2, "delta": 1}

    def test_family_two_empty_below_six(self):
        assert enumerate_middle_psf(4, families={2}) == []

    def test_sorted_and_deduplicated(self):
        records = enumerate_middle_psf(15)
        keys = [record.key for record in records]
        assert keys == sorted(keys)
        identities = [(r.params.p, r.params.q, r.params.r, r.params.n) for r in records]
        assert len(identities) == len(set(identities))

    def test_every_record_is_primitive_middle_sf(self):
        for record in enumerate_middle_psf(12):
            report = psf_report(record.params)
            assert report.flags.is_primitive_sf
            assert report.inside.middle()

    def test_q_bound(self):
        records = enumerate_middle_psf(10, max_q=12)
        assert all(record.params.q <= 12 for record in records)

    def test_rejects_empty_range(self):
        with pytest.raises(InvalidParametersError):
            enumerate_middle_psf(0)


class TestFamilyTables:
    def test_family_two(self):
        record = _record(enumerate_middle_psf(7), 2, 7, 2, 3, 1)
        assert family_multiplicities(record).mu == (2, 3, 5)

    def test_family_one(self):
        record = _record(enumerate_middle_psf(7), 1, 7, 5, 3, 1)
        assert family_multiplicities(record).mu == (2, 3, 2)
        assert record.triple.mu == (2, 3, 2)

    def test_family_three(self):
        record = _record(enumerate_middle_psf(7), 3, 7, 5, 4, -1)
        assert family_multiplicities(record).mu == (2, 3, 7)
        assert record.triple.mu == (2, 3, 7)

    def test_rows_one_and_two_match_determinant(self):
        for record in enumerate_middle_psf(30, families={1, 2}, with_certificates=False):
            assert family_multiplicities(record).mu == record.triple.mu

    def test_corrected_family_four(self):
        for record in enumerate_middle_psf(25, families={4}, with_certificates=False):
            fp = record.family_params
            expected = corrected_family4_mu3(fp["l"], fp["s"], fp["t"], record.params.n)
            assert expected == record.triple.mu3
            assert family_multiplicities(record, corrected=True).mu3 == record.triple.mu3


class TestCertificates:
    def test_euler_characteristic(self):
        assert braid_euler_char(7, 2, 3) == -11
        assert braid_euler_char(33, 2, 5) == -51
        assert braid_euler_char(5, 3, 0) == -7

    def test_euler_characteristic_needs_positive_braid(self):
        with pytest.raises(InvalidParametersError):
            braid_euler_char(7, 2, 3, eps=-1)

    def test_moser(self):
        assert moser_multiplicities(10, 7, 75) == (10, 7, 5)
        assert moser_multiplicities(2, 3, 6) == (2, 3, 0)
        assert moser_multiplicities(14, 5, 63)[2] == 7

    def test_moser_rejects_common_factor(self):
        with pytest.raises(InvalidParametersError):
            moser_multiplicities(4, 6, 10)

    def test_running_example_certified(self, k7231):
        triple = multiplicity_triple(k7231)
        certificate = nontorus_certificate(k7231, 23, triple)
        assert certificate.delta == 2
        assert certificate.chi == -11
        assert certificate.certified

    def test_slope_criterion_fails_but_fiber_criterion_holds(self):
        params = TtkParams(p=25, q=2, r=5)
        triple = multiplicity_triple(params)
        certificate = nontorus_certificate(params, 75, triple)
        assert not certificate.moser_excluded
        assert certificate.delta == 10
        assert certificate.certified

    def test_torus_knot_never_certified(self):
        params = TtkParams(p=5, q=3, r=0)
        triple = MultiplicityResult.build(3, 5, 1, slope=16)
        certificate = nontorus_certificate(params, 16, triple)
        assert certificate.delta is None
        assert not certificate.certified

    def test_negative_twist_has_no_chi(self, k7231_negative):
        triple = multiplicity_triple(k7231_negative)
        assert nontorus_certificate(k7231_negative, triple.slope, triple).chi is None

    def test_certified_rule_enforced(self):
        with pytest.raises(ValidationError):
            NonTorusCertificate(delta=-1, chi=-5, moser_excluded=False, certified=True)


class TestRealization:
    def test_negative(self):
        record = realize_triple(2, 3, 4, "negative")
        assert record.params.as_tuple() == (23, 5, 3, 1, -1)
        assert record.slope == 106
        assert record.triple.as_multiset() == (2, 3, 4)
        assert record.in_family_range

    def test_negative_235(self):
        record = realize_triple(2, 3, 5)
        assert record.params.as_tuple() == (28, 5, 3, 1, -1)
        assert record.slope == 131
        assert record.triple.mu == (5, 3, 2)

    def test_positive(self):
        record = realize_triple(5, 3, 2, "positive")
        assert record.params.as_tuple() == (7, 2, 3, 1, 1)
        assert record.slope == 23
        assert record.triple.as_multiset() == (2, 3, 5)

    def test_positive_swaps_order(self):
        assert realize_triple(3, 5, 2, "positive").params.as_tuple() == (7, 2, 3, 1, 1)

    def test_positive_needs_gap(self):
        with pytest.raises(TripleNotRealizableError):
            realize_triple(3, 4, 2, "positive")

    def test_coprime_pair_required(self):
        with pytest.raises(TripleNotRealizableError):
            realize_triple(2, 4, 3)

    def test_outside_family_range_uses_table(self):
        record = realize_triple(1, 1, 1)
        assert not record.in_family_range
        assert record.triple.mu == (1, 1, 1)
        assert not record.certificate.certified

    def test_negative_outputs_excluded_by_moser(self):
        for mu in [(2, 3, 4), (3, 4, 5), (5, 2, 3)]:
            assert realize_triple(*mu).certificate.moser_excluded

    def test_spherical(self):
        for mu in spherical_triples(9):
            record = realize_multiset(mu)
            assert record.triple.as_multiset() == tuple(sorted(mu))
            assert record.certificate.certified

    def test_spherical_list(self):
        assert spherical_triples(7) == [
            (2, 3, 3),
            (2, 3, 4),
            (2, 3, 5),
            (2, 2, 3),
            (2, 2, 5),
            (2, 2, 7),
        ]


class TestSerialization:
    def test_json_row(self):
        row = realize_triple(2, 3, 4).to_row()
        assert list(row) == [
            "family",
            "family_params",
            "p",
            "q",
            "r",
            "m",
            "n",
            "slope",
            "mu",
            "certificates",
        ]
        assert row["mu"] == [4, 3, 2]
        assert row["family_params"] == {"k": 4}

    def test_tsv_columns_match_json_keys(self):
        assert list(TSV_COLUMNS) == list(realize_triple(2, 3, 4).to_row())

    def test_tsv_row(self):
        fields = realize_triple(2, 3, 4).to_tsv().split("\t")
        assert len(fields) == len(TSV_COLUMNS)
        assert fields[:9] == ["2", "k=4", "23", "5", "3", "1", "-1", "106", "4,3,2"]
