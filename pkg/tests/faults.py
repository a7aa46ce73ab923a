"""Load the shipped catalog with one field of one file altered."""

from wzpi.catalog import Catalog, default_catalog_path, parse_catalog, validate


def load_with(filename: str, old: str, new: str) -> Catalog:
    cat = Catalog()
    hit = False
    for f in sorted(default_catalog_path().glob("*.cat")):
        text = f.read_text(encoding="utf-8")
        if f.name == filename:
            assert text.count(old) >= 1, f"{old!r} not in {filename}"
            text = text.replace(old, new, 1)
            hit = True
        parse_catalog(text, f.name, cat)
    assert hit, filename
    return validate(cat)


def write_with(tmp_path, filename: str, old: str, new: str):
    """Copy of the shipped catalog directory with one field altered."""
    for f in default_catalog_path().glob("*.cat"):
        text = f.read_text(encoding="utf-8")
        if f.name == filename:
            text = text.replace(old, new, 1)
        (tmp_path / f.name).write_text(text, encoding="utf-8")
    return tmp_path
