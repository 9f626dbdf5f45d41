import functools

import pytest
from hypothesis import given, settings, strategies as st

from km import words
from km.words import (
    Decomposition,
    dagger_decomposition,
    discover_relations,
    enumerate_ball,
    classify,
    classify_all,
    log3_decomposition,
    multiply,
    reduce_word,
    inverse_word,
    translate_cone,
    verify_partition,
    verify_relation,
)

letters = st.text(alphabet="aAbB", max_size=12)


@functools.lru_cache(maxsize=None)
def _dagger_relations_depth8():
    return tuple(discover_relations(dagger_decomposition(), 2, 8))


def brute_reduce(w):
    # independent oracle: repeatedly delete the first cancelling pair
    w = list(w)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i + 1] == words.inverse_letter(w[i]):
                del w[i:i + 2]
                changed = True
                break
    return "".join(w)


class TestReduce:
    def test_examples(self):
        assert reduce_word("aAb") == "b"
        assert reduce_word("") == ""
        assert reduce_word("abBA") == ""

    @given(letters)
    def test_matches_brute_force(self, w):
        assert reduce_word(w) == brute_reduce(w)

    @given(letters)
    def test_idempotent(self, w):
        r = reduce_word(w)
        assert reduce_word(r) == r


class TestMultiply:
    def test_examples(self):
        assert multiply("aB", "bA") == ""
        assert multiply("ab", "b") == "abb"
        assert multiply("A", "abb") == "bb"

    @given(letters, letters)
    def test_matches_concat_reduce(self, u, v):
        u, v = reduce_word(u), reduce_word(v)
        assert multiply(u, v) == reduce_word(u + v)

    @given(letters, letters)
    def test_length_subadditive(self, u, v):
        u, v = reduce_word(u), reduce_word(v)
        assert len(multiply(u, v)) <= len(u) + len(v)

    @given(letters)
    def test_inverse(self, w):
        w = reduce_word(w)
        assert multiply(w, inverse_word(w)) == ""
        assert multiply(inverse_word(w), w) == ""


class TestEnumerateBall:
    @pytest.mark.parametrize("L,count", [(0, 1), (1, 5), (3, 53)])
    def test_counts(self, L, count):
        ball = enumerate_ball(L)
        assert len(ball) == count
        assert len(ball) == 1 + 2 * (3 ** L - 1)

    def test_order_and_reduced(self):
        ball = enumerate_ball(4)
        assert ball == sorted(set(ball), key=words.word_key)
        assert all(words.is_reduced(w) for w in ball)

    def test_cap(self):
        with pytest.raises(words.WordError):
            enumerate_ball(15)


class TestClassify:
    def test_dagger_examples(self):
        dec = dagger_decomposition()
        assert classify(dec, "a") == (words.RESIDUE, "a")
        assert classify(dec, "aab") == (words.CONE, "aa")

    def test_log3_example(self):
        dec = log3_decomposition()
        assert classify(dec, "Ba") == (words.CONE, "B")

    def test_identity(self):
        assert classify(dagger_decomposition(), "") == (words.IDENTITY, "")

    def test_unclassifiable(self):
        dec = Decomposition("tiny", ("ab",))
        with pytest.raises(words.UnclassifiableWord):
            classify(dec, "b")

    def test_ambiguous(self):
        dec = Decomposition("overlap", ("a", "ab"))
        with pytest.raises(words.AmbiguousClassification):
            classify(dec, "abb")


class TestVerifyPartition:
    @pytest.mark.parametrize("preset", ["dagger", "log3"])
    def test_presets_valid_depth8(self, preset):
        report = verify_partition(words.get_preset(preset), 8)
        assert report.valid
        assert report.words_checked == 1 + 2 * (3 ** 8 - 1)

    def test_invalid_decomposition(self):
        report = verify_partition(Decomposition("tiny", ("ab",)), 2)
        assert not report.valid
        assert ("b", 0) in report.violations


class TestTranslateCone:
    def test_dagger_example_depth2(self):
        # brute-force oracle: all products gamma*u over cone members
        dec = dagger_decomposition()
        got = translate_cone(dec, "aB", "b", 2)
        expected = set(enumerate_ball(2)) - {"aB"}
        assert got == expected

    def test_log3_hand_enumeration(self):
        dec = log3_decomposition()
        got = translate_cone(dec, "a", "A", 1)
        assert got == {"", "A", "b", "B"}

    def test_identity_translation(self):
        dec = dagger_decomposition()
        got = translate_cone(dec, "", "b", 3)
        assert got == set(words.cone_members("b", 3))

    def test_matches_independent_product_construction(self):
        dec = dagger_decomposition()
        gamma, psi, L = "ab", "BA", 4
        ball = enumerate_ball(L + len(gamma))
        oracle = {
            multiply(gamma, u)
            for u in ball
            if u.startswith(psi) and len(multiply(gamma, u)) <= L
        }
        assert translate_cone(dec, gamma, psi, L) == oracle


class TestDiscoverRelations:
    def test_log3_four_relations(self):
        dec = log3_decomposition()
        rels = discover_relations(dec, 1, 10)
        assert len(rels) == 4
        for rel in rels:
            assert rel.source == inverse_word(rel.gamma)
            assert rel.excluded == (rel.gamma,)

    def test_dagger_eighteen_relations(self):
        dec = dagger_decomposition()
        rels = discover_relations(dec, 2, 10)
        assert len(rels) == 18
        triples = {(r.gamma, r.source, r.excluded) for r in rels}
        # the singleton identity gamma=xy^-1: s=y, S={xy^-1}
        assert ("aB", "b", ("aB",)) in triples
        # gamma=xy: s=y^-1x^-1, S={x, xy, x^2, xy^-1}
        assert ("ab", "BA", ("a", "aa", "ab", "aB")) in triples or (
            "ab",
            "BA",
            tuple(sorted(("a", "ab", "aa", "aB"), key=words.word_key)),
        ) in triples

    def test_dagger_excluded_sizes(self):
        rels = discover_relations(dagger_decomposition(), 2, 8)
        dec = dagger_decomposition()
        sizes = sorted(len(r.excluded_prefixes(dec)) for r in rels)
        assert sizes == [1] * 4 + [3] * 4 + [5] * 4 + [7] * 6

    def test_stability_depth_8_vs_10(self):
        dec = dagger_decomposition()
        r8 = {(r.gamma, r.source, r.excluded) for r in discover_relations(dec, 2, 8)}
        r10 = {(r.gamma, r.source, r.excluded) for r in discover_relations(dec, 2, 10)}
        assert r8 == r10

    def test_soundness_via_independent_membership(self):
        dec = dagger_decomposition()
        for rel in _dagger_relations_depth8():
            assert verify_relation(dec, rel, rel.verified_depth - 2)

    def test_log3_soundness(self):
        dec = log3_decomposition()
        for rel in discover_relations(dec, 1, 8):
            assert verify_relation(dec, rel, 6)

    def test_exhaustive_superset(self):
        # enumerating every nonidentity gamma finds extra transposed identities,
        # and the canonical 18 remain among them
        dec = dagger_decomposition()
        canonical = {(r.gamma, r.source, r.excluded) for r in discover_relations(dec, 2, 8)}
        everything = {
            (r.gamma, r.source, r.excluded)
            for r in discover_relations(dec, 2, 8, all_words=True)
        }
        assert canonical <= everything
        assert len(everything) == 24

    def test_depth_precondition(self):
        with pytest.raises(words.WordError):
            discover_relations(dagger_decomposition(), 2, 3)

    def test_deterministic_order(self):
        dec = dagger_decomposition()
        a = discover_relations(dec, 2, 8)
        b = discover_relations(dec, 2, 8)
        assert a == b
        keys = [(words.word_key(r.gamma), words.word_key(r.source)) for r in a]
        assert keys == sorted(keys)


class TestSerialization:
    def test_format_parse_roundtrip(self):
        for w in enumerate_ball(3):
            assert words.parse_word(words.format_word(w)) == w

    def test_identity_renders_as_one(self):
        assert words.format_word("") == "1"
