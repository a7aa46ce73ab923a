import pytest

from wzpi.catalog import DanglingReference, DuplicateId, ParseError, load_catalog, parse_catalog, validate
from wzpi.identity import ANALYTIC

PAIRS = ["intro-1", "intro-2"] + [f"eq{i}" for i in range(1, 21)] + ["eq-n1-1", "eq-n1-2", "eq-n4-1", "eq-n4-2"]
SERIES = ["rama-intro"] + [f"rama-{s}-{i}" for s in (
    "1over2", "1over9", "32over81", "-1over8", "1over4", "n1", "n1over8", "n1over4", "n4", "2-27", "9-64000",
    "1-48") for i in (0, 1)]
TRANSFORMS = ["clausen-1", "clausen-2", "clausen-3", "euler"]
PRODUCTS = ["assembly-intro"] + [f"assembly-{s}-{i}" for s in (
    "1over2", "1over9", "32over81", "-1over8", "2-27", "9-64000", "1-48") for i in (0, 1)]

MINIMAL = """
section s { title = "t"; s = 2; z = 1/4; }
identity a {
    kind = series;
    section = s;
    term = "poch(1/2,n)^3/poch(1,n)^3*(1/4)^n";
    weight = "6n+1";
    rhs_const = "4/pi";
}
"""


def test_manifest(catalog):
    assert sorted(catalog.ids()) == sorted(PAIRS + SERIES + TRANSFORMS + PRODUCTS)
    assert len(catalog) >= 40


def test_kinds(catalog):
    assert sorted(e.id for e in catalog.of_kind("pair")) == sorted(PAIRS)
    assert len(catalog.of_kind("pair")) == 26


def test_partners_are_mutual(catalog):
    for e in catalog.of_kind("pair"):
        assert catalog[e.partner].partner == e.id
        assert catalog[e.target].kind == "series"


def test_analytic_flags_exactly_on_divergent_section(catalog):
    flagged = sorted(e.id for e in catalog if ANALYTIC in e.flags)
    assert flagged == ["eq-n4-1", "eq-n4-2", "rama-n4-0", "rama-n4-1"]


def test_alternating_entries_use_30_digits(catalog):
    assert catalog["rama-n1-0"].digits == catalog["rama-n1-1"].digits == 30


def test_surd_entries_get_radicand(catalog):
    assert catalog["intro-1"].radicand == 5
    assert catalog["eq1"].radicand is None


def test_sections(catalog):
    assert catalog.sections["s3-z1over2"].s == 3


def test_empty_file():
    assert len(parse_catalog("", "empty.cat")) == 0
    assert len(parse_catalog("# only a comment\n")) == 0


def test_minimal_entry():
    cat = validate(parse_catalog(MINIMAL))
    e = cat["a"]
    assert e.kind == "series" and e.rhs.const == "4/pi"


def test_dangling_reference():
    text = MINIMAL.replace('rhs_const = "4/pi";', 'rhs_const = "4/pi";\n    partner = ghost;')
    with pytest.raises(DanglingReference):
        validate(parse_catalog(text))


def test_duplicate_id():
    with pytest.raises(DuplicateId):
        parse_catalog(MINIMAL + MINIMAL.replace("section s {", "section s2 {"))


def test_parse_error_position():
    text = MINIMAL.replace('weight = "6n+1";', 'weight = "6n+1"')
    with pytest.raises(ParseError) as info:
        parse_catalog(text, "bad.cat")
    assert info.value.line == 8
    assert "bad.cat" in str(info.value)


def test_bad_term_reports_field_line():
    text = MINIMAL.replace("poch(1/2,n)^3", "poch(n,k)^3")
    with pytest.raises(ParseError) as info:
        parse_catalog(text)
    assert info.value.line == 6


def test_unknown_key():
    with pytest.raises(ParseError):
        parse_catalog(MINIMAL.replace("kind = series;", "kind = series;\n    colour = red;"))


def test_missing_required_key():
    with pytest.raises(ParseError):
        parse_catalog(MINIMAL.replace('rhs_const = "4/pi";', ""))


def test_load_single_file(tmp_path):
    p = tmp_path / "one.cat"
    p.write_text(MINIMAL)
    assert load_catalog(p).ids() == ["a"]
