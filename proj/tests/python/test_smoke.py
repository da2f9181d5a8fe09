import json

import pytest

import twistlab as tl


def test_profile_from_fixture():
    E = tl.profile("53a1")
    assert E.label == "53a1"
    assert E.conductor == 53
    assert E.root_number == -1
    assert E.ordinary_at_2
    assert not E.rational_two_torsion
    assert E.mod2_image == "full S3"
    assert (E.mu2, E.lambda2) == (0, 1)
    assert E.a_invariants == [1, -1, 1, 0, 0]
    assert "53a1" in repr(E)


def test_classify_prime():
    E = tl.profile("53a1")
    c = tl.classify_prime(E, 13)
    assert c["residue_mod8"] == 5
    assert c["splits_fully_F"] and c["in_M"]
    assert not c["in_omega"] and not c["in_P"]
    with pytest.raises(tl.Error):
        tl.classify_prime(E, 53)


def test_certify_and_lambda():
    E = tl.profile("53a1")
    cert = tl.certify(E, 6409)
    assert cert["conclusion"] == "CorankOneProved;LambdaEquals(1)"
    assert (cert["lambda_twist"], cert["omega_twist"], cert["corank_upper"]) == (1, -1, 1)
    assert cert["lambda_equals"] == 1
    # 5 lies in Omega with n_ell = 0, so the twist picks up 2^(0+1) = 2.
    assert tl.matsuno_lambda(E, 5) == 3
    assert tl.twist_root_number(E, 6409) == -1


def test_certify_even_parity():
    E = tl.profile("15a7")
    cert = tl.certify(E, 17)
    assert cert["parity"] == 0
    assert cert["conclusion"].startswith("CorankAtMost(")
    assert cert["lambda_equals"] is None


def test_construct_round_trip():
    # Construction draws only on pool primes (in Omega, 3 or 5 mod 8), so for
    # this curve the answer is 11 * 13, not the smaller d = 7 available to the
    # transfer formula itself.
    E = tl.profile("15a7")
    d = tl.construct_d_with_lambda(E, 4)
    assert d == 143
    assert tl.matsuno_lambda(E, d) == 4
    assert tl.matsuno_lambda(E, 7) == 4


def test_explicit_curve_needs_iwasawa_data():
    bare = tl.profile_from_a_invariants([1, -1, 1, 0, 0])
    assert bare.conductor == 53 and bare.lambda2 is None
    with pytest.raises(tl.Error):
        tl.certify(bare, 3)
    full = tl.profile_from_a_invariants([1, -1, 1, 0, 0], mu2=0, lambda2=1)
    assert tl.certify(full, 6409)["conclusion"] == "CorankOneProved;LambdaEquals(1)"


def test_hypothesis_errors_translate():
    E = tl.profile("53a1")
    with pytest.raises(tl.Error):
        tl.matsuno_lambda(E, 12)  # not squarefree
    with pytest.raises(tl.Error):
        tl.certify(E, 53)  # shares a factor with N
    with pytest.raises(tl.Error):
        tl.profile("no such label")


def test_census_json():
    E = tl.profile("53a1")
    rep = json.loads(tl.census_json(E, 2000))
    sf = rep["squarefree_census"]
    assert sf["total"] == 795
    assert sf["n_Omega"] == 192
    assert rep["prime_census"] is None
    tally = tl.prime_census(E, 1000)
    assert tally["classified"] == 166
    assert tally["in_omega"] == 117
