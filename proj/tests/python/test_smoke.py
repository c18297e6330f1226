import math
import os
import sys
import tempfile

import lexopt

FIXTURE = os.environ.get(
    "LEXOPT_FIXTURE_DIR",
    os.path.join(os.path.dirname(__file__), "..", "..", "data", "fixture"),
)


def example_table():
    t = lexopt.SurprisalTable()
    t.add("ab", 2.0, 10)
    t.add("ab", 24.0, 1)
    return t


def test_corpus():
    assert lexopt.ingest_and_filter("The cat, the DOG.") == ["The", "cat,", "the", "DOG."]
    cfg = lexopt.CorpusConfig()
    cfg.lowercase = True
    cfg.filter_protocol = lexopt.FilterProtocol.NoPunct
    tokens = lexopt.ingest_and_filter("The cat the DOG. !", cfg)
    assert tokens == ["the", "cat", "the"]
    freq = lexopt.count_frequencies(tokens)
    assert freq["the"].frequency == 2
    assert freq.total_tokens == 3
    assert "cat" in freq
    back = lexopt.FrequencyTable.from_tsv(freq.to_tsv())
    assert len(back) == len(freq)
    try:
        lexopt.ingest_and_filter(b"ok \xc3(")
        raise AssertionError("expected DecodeError")
    except lexopt.DecodeError as e:
        assert "offset 3" in str(e)


def test_ngram():
    m = lexopt.train_ngram(["a", "a", "b"], 1, [1.0])
    assert m.probability("a") == 0.5
    assert m.probability("b") == 0.25
    assert m.probability("zzz") == 0.25
    reserved = lexopt.train_ngram(["a", "a", "b"], 1, [1.0], reserved=["c"])
    assert reserved.probability("c") == 0.125
    table = lexopt.score_corpus(m, ["a", "b"])
    assert len(table) == 2
    assert math.isclose(lexopt.cross_entropy(m, ["a", "b"]), 1.5)
    try:
        lexopt.train_ngram(["a"], 0, [])
        raise AssertionError("expected ConfigError")
    except lexopt.ConfigError:
        pass


def test_hypotheses():
    t = example_table()
    assert lexopt.predict_cch_lower(t).per_word["ab"] == 4.0
    assert lexopt.predict_cch(t).per_word["ab"] == 14.0
    z = lexopt.predict_zipf(lexopt.count_frequencies(["a", "a", "b", "b"]))
    assert z.per_word == {"a": 1.0, "b": 1.0}
    assert z.hypothesis == lexopt.Hypothesis.Zipf


def test_coder():
    book = lexopt.build_huffman_k({"a": 0.5, "b": 0.25, "c": 0.25}, 2)
    assert sorted(len(cw) for cw in book.code.values()) == [1, 2, 2]
    assert book.expected_length == 1.5
    assert lexopt.kraft_sum(book) == 1.0
    assert lexopt.is_prefix_free(book)
    words = ["a", "c", "b", "a"]
    assert lexopt.roundtrip(book, words) == words
    ternary = lexopt.build_huffman_k(lexopt.count_frequencies(["x", "y", "y", "z"]), 3)
    assert ternary.k == 3


def test_costs():
    t = example_table()
    freq = lexopt.count_frequencies(["ab"] * 5)
    spec = lexopt.CostSpec(2.0)
    assert lexopt.closed_form_cch_lengths(t, spec).per_word["ab"] == 7.0
    assert lexopt.objective_cost(lexopt.LengthAssignment({"ab": 2.0}), t, freq, spec) == 10.0
    assert lexopt.distance(3.0, lexopt.CostSpec(2.0, lam=4.0)) == 4.0
    opt = lexopt.optimize_lengths(t, spec)
    assert abs(opt.per_word["ab"] - 7.0) < 1e-9
    try:
        lexopt.CostSpec(0.0)
        raise AssertionError("expected ConfigError")
    except lexopt.ConfigError:
        pass


def test_eval():
    assert abs(lexopt.spearman([1, 2, 2, 3], [1, 3, 2, 4]) - 3 / math.sqrt(10)) < 1e-15
    slope, mse = lexopt.weighted_fit([2, 4], [4, 2], [3, 1])
    assert abs(slope - 8 / 7) < 1e-12
    assert abs(mse - 27 / 7) < 1e-12
    try:
        lexopt.pearson([1, 2, 3], [5, 5, 5])
        raise AssertionError("expected DataError")
    except lexopt.DataError:
        pass


def test_pipeline():
    with tempfile.TemporaryDirectory() as out:
        c = lexopt.RunConfig()
        c.train_path = os.path.join(FIXTURE, "train.txt")
        c.test_path = os.path.join(FIXTURE, "test.txt")
        c.output_dir = out
        c.language = "fixture"
        c.lambdas = [1.0]
        r = lexopt.run_pipeline(c)
        names = [name for name, _ in r.report.per_hypothesis]
        for h in ("zipf", "cch_lower", "cch"):
            assert h in names
        assert r.cross_entropy is not None and r.cross_entropy > 0
        for f in r.files:
            assert os.path.exists(os.path.join(out, f))
        assert '"config_digest"' in r.report.to_json()


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print("ok", name)
            except Exception as e:  # noqa: BLE001
                failures += 1
                print("FAIL", name, repr(e))
    sys.exit(1 if failures else 0)
