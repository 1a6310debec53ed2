import pytest

import subopt

# rotation ad_1 with no closed form in the supported class
CYCLIC = "dim 3; [e1,e2] = e3; [e1,e3] = e2"


def test_catalog_labels():
    labels = subopt.labels()
    assert len(labels) == 18
    assert "A_{3,8}" in labels and "A_2+2A_1" in labels
    assert subopt.canonical_label("nilpotent4") == "A_{4,1}"
    assert subopt.canonical_label("A35") == "A_{3,5}^a"


def test_a38_counts_and_greek():
    rep = subopt.optimal_system("A_{3,8}")
    assert rep["schema"] == "subopt-report/1"
    reps = {d["d"]: d["representatives"] for d in rep["dimensions"]}
    assert len(reps[1]) == 3 and len(reps[2]) == 1
    kinds = [[c["kind"] for c in r["coefficients"]] for r in reps[1]]
    assert ["greek"] in kinds
    assert all(d["oracle"]["failed"] == 0 for d in rep["dimensions"])


def test_a2_2a1_cardinalities():
    got = subopt.representatives("A_2+2A_1")
    assert {d: len(v) for d, v in got.items()} == {1: 11, 2: 17, 3: 8}


def test_byte_stable_for_fixed_seed():
    a = subopt._core.report_json("A_{3,3}", [], 2, 7, 1, "strong", "reach", 8, {})
    b = subopt._core.report_json("A_{3,3}", [], 2, 7, 1, "strong", "reach", 8, {})
    assert a == b
    assert subopt.optimal_system("A_{3,3}", seed=7)["options"]["seed"] == "0x7"


def test_document_source_matches_catalog():
    doc = subopt.catalog_document("A_{3,8}")
    assert subopt.normalize_document(doc) == doc
    assert subopt.representatives(doc) == subopt.representatives("A_{3,8}")


def test_instantiated_parameter():
    got = subopt.representatives("A_{3,5}^a", values={"a": "1/2"})
    assert set(got) == {1, 2}
    with pytest.raises(ValueError):
        subopt.optimal_system("A_{3,5}^a", values={"a": "2"})


def test_dot():
    g = subopt.dot("3A_1", 1)
    assert "digraph G {" in g
    assert sum(1 for line in g.splitlines() if line.startswith("//") and "->" in line) == 7


def test_errors():
    with pytest.raises(subopt.UnknownLabel):
        subopt.optimal_system("A_{9,9}")
    with pytest.raises(KeyError):
        subopt.optimal_system("A_{9,9}")
    with pytest.raises(subopt.ParseError) as e:
        subopt.normalize_document("dim 3\n[e1,e2] = e1 +* e3\n")
    assert isinstance(e.value, ValueError)
    with pytest.raises(subopt.AlgebraError):
        subopt.normalize_document("dim 3; [e1,e2] = e3; [e1,e3] = e1")
    with pytest.raises(subopt.ExponentialUnavailable):
        subopt.optimal_system(CYCLIC)
    with pytest.raises(ValueError):
        subopt.optimal_system("A_{3,8}", dims=[3])
