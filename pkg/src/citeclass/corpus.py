"""Corpus data model: classification scheme, journals, documents, citations.

File formats:

  scheme CSV      header ``code,name,area_code,area_name,is_misc,is_multidisciplinary``.
                  Rows with a non-empty ``code`` define categories; the
                  multidisciplinary area appears as a single row with an empty
                  ``code``. Areas are defined by the (area_code, area_name)
                  pairs on the rows that mention them.

  journals JSONL  one object per line:
                  ``{"journal_id": str, "asjc_codes": [str, ...]}``

  documents JSONL one object per line:
                  ``{"doc_id": str, "journal_id": str, "year": int,
                  "doc_type": str, "references": [str, ...],
                  "external_citations": int (optional, default 0)}``

Loading is strict: structurally malformed input raises ParseError (with line
or record position), semantic problems raise ValidationError (all collected).
Loaded objects are immutable; every ordering is lexicographic so identical
inputs yield identical in-memory layouts and byte-identical re-serialization.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

SCHEME_HEADER = ["code", "name", "area_code", "area_name", "is_misc", "is_multidisciplinary"]

MAX_REPORTED_ERRORS = 100


class ParseError(Exception):
    """Structurally malformed input (bad CSV/JSON, wrong field types)."""


class ValidationError(Exception):
    """Semantically invalid input. Carries the full list of problems."""

    def __init__(self, errors: Iterable[str]):
        self.errors = list(errors)
        shown = self.errors[:MAX_REPORTED_ERRORS]
        if len(self.errors) > MAX_REPORTED_ERRORS:
            shown.append(f"... and {len(self.errors) - MAX_REPORTED_ERRORS} more")
        super().__init__("; ".join(shown))


@dataclass(frozen=True, slots=True)
class Area:
    code: str
    name: str
    is_multidisciplinary: bool = False


@dataclass(frozen=True, slots=True)
class Category:
    code: str
    name: str
    area_code: str
    is_misc: bool = False


class Scheme:
    """A two-level classification: areas containing categories.

    Invariants enforced here:
      * category and area codes are non-empty and unique
      * every category's area exists and is not the multidisciplinary area
      * at most one area is multidisciplinary, and it owns no categories
      * every other area has at least one non-misc category and at most one
        misc category
    """

    def __init__(self, categories: Iterable[Category], areas: Iterable[Area]):
        self.categories: tuple[Category, ...] = tuple(sorted(categories, key=lambda c: c.code))
        self.areas: tuple[Area, ...] = tuple(sorted(areas, key=lambda a: a.code))
        errors: list[str] = []

        self.area_by_code: dict[str, Area] = {}
        for a in self.areas:
            if not a.code:
                errors.append("area with empty code")
            elif a.code in self.area_by_code:
                errors.append(f"duplicate area code {a.code!r}")
            else:
                self.area_by_code[a.code] = a

        multi = [a for a in self.areas if a.is_multidisciplinary]
        if len(multi) > 1:
            errors.append("more than one multidisciplinary area: " + ", ".join(a.code for a in multi))
        self.multi_area: Area | None = multi[0] if len(multi) == 1 else None

        self.category_by_code: dict[str, Category] = {}
        for c in self.categories:
            if not c.code:
                errors.append(f"category {c.name!r} with empty code")
            elif c.code in self.category_by_code:
                errors.append(f"duplicate category code {c.code!r}")
            else:
                self.category_by_code[c.code] = c
            area = self.area_by_code.get(c.area_code)
            if area is None:
                errors.append(f"category {c.code!r} references unknown area {c.area_code!r}")
            elif area.is_multidisciplinary:
                errors.append(f"category {c.code!r} assigned to multidisciplinary area {area.code!r}")

        self.cat_to_area: dict[str, str] = {c.code: c.area_code for c in self.categories}
        by_area: dict[str, list[Category]] = {a.code: [] for a in self.areas}
        for c in self.categories:
            if c.area_code in by_area:
                by_area[c.area_code].append(c)

        self.non_misc_by_area: dict[str, tuple[str, ...]] = {}
        self.misc_by_area: dict[str, str | None] = {}
        for a in self.areas:
            if a.is_multidisciplinary:
                continue
            cats = by_area[a.code]
            non_misc = tuple(c.code for c in cats if not c.is_misc)
            misc = [c.code for c in cats if c.is_misc]
            if not non_misc:
                errors.append(f"area {a.code!r} has no non-misc category")
            if len(misc) > 1:
                errors.append(f"area {a.code!r} has more than one misc category: " + ", ".join(misc))
            self.non_misc_by_area[a.code] = non_misc
            self.misc_by_area[a.code] = misc[0] if misc else None

        self.non_misc_codes: tuple[str, ...] = tuple(
            c.code for c in self.categories if not c.is_misc
        )

        if errors:
            raise ValidationError(errors)

    def is_assignable_code(self, code: str) -> bool:
        """True if a journal may carry this code (category or multi area)."""
        if code in self.category_by_code:
            return True
        return self.multi_area is not None and code == self.multi_area.code


@dataclass(frozen=True, slots=True)
class Journal:
    journal_id: str
    asjc_codes: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    journal_id: str
    year: int
    doc_type: str
    references: tuple[str, ...]
    external_citations: int = 0


class Corpus:
    """An immutable set of journals and documents against one Scheme.

    Documents are kept sorted by doc_id; each document's references are
    sorted and duplicate-free. References may point outside the corpus
    (external references); those resolve to nothing but still count toward
    the document's reference total.
    """

    def __init__(
        self,
        scheme: Scheme,
        journals: Iterable[Journal],
        documents: Iterable[Document],
        year_min: int | None = None,
        year_max: int | None = None,
    ):
        self.scheme = scheme
        self.year_min = year_min
        self.year_max = year_max
        errors: list[str] = []

        self.journals: dict[str, Journal] = {}
        for j in sorted(journals, key=lambda j: j.journal_id):
            if not j.journal_id:
                errors.append("journal with empty id")
                continue
            if j.journal_id in self.journals:
                errors.append(f"duplicate journal_id {j.journal_id!r}")
                continue
            if not j.asjc_codes:
                errors.append(f"journal {j.journal_id!r} has no codes")
            if len(set(j.asjc_codes)) != len(j.asjc_codes):
                errors.append(f"journal {j.journal_id!r} lists a code more than once")
            for code in j.asjc_codes:
                if not scheme.is_assignable_code(code):
                    errors.append(f"journal {j.journal_id!r} carries unknown code {code!r}")
            # Code order carries no meaning; store sorted so equal corpora
            # serialize identically.
            if any(j.asjc_codes[i] >= j.asjc_codes[i + 1] for i in range(len(j.asjc_codes) - 1)):
                j = Journal(j.journal_id, tuple(sorted(j.asjc_codes)))
            self.journals[j.journal_id] = j

        docs = sorted(documents, key=lambda d: d.doc_id)
        self._index: dict[str, int] = {}
        for pos, d in enumerate(docs):
            if not d.doc_id:
                errors.append(f"document at position {pos} has empty doc_id")
                continue
            if d.doc_id in self._index:
                errors.append(f"duplicate doc_id {d.doc_id!r}")
                continue
            self._index[d.doc_id] = pos
            if d.journal_id not in self.journals:
                errors.append(f"document {d.doc_id!r} references unknown journal {d.journal_id!r}")
            if year_min is not None and d.year < year_min:
                errors.append(f"document {d.doc_id!r} year {d.year} below period start {year_min}")
            if year_max is not None and d.year > year_max:
                errors.append(f"document {d.doc_id!r} year {d.year} above period end {year_max}")
            if d.doc_id in d.references:
                errors.append(f"document {d.doc_id!r} cites itself")
            if d.external_citations < 0:
                errors.append(f"document {d.doc_id!r} has negative external_citations")
        # Defensive: references must be sorted and duplicate-free for the
        # citation index to count correctly. Rebuild only when violated.
        normalized: list[Document] = []
        for d in docs:
            refs = d.references
            if any(refs[i] >= refs[i + 1] for i in range(len(refs) - 1)):
                d = Document(
                    d.doc_id, d.journal_id, d.year, d.doc_type,
                    tuple(sorted(set(refs))), d.external_citations,
                )
            normalized.append(d)
        self.documents: list[Document] = normalized

        if errors:
            raise ValidationError(errors)

        self._edges: tuple[np.ndarray, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    def doc(self, doc_id: str) -> Document:
        return self.documents[self._index[doc_id]]

    def position(self, doc_id: str) -> int:
        return self._index[doc_id]

    def ref_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """In-corpus reference edges as (citing_pos, cited_pos) int32 arrays.

        Ordered by citing position then cited position. External references
        are not represented.
        """
        if self._edges is None:
            citing: list[int] = []
            cited: list[int] = []
            index = self._index
            for pos, d in enumerate(self.documents):
                for r in d.references:
                    rp = index.get(r)
                    if rp is not None:
                        citing.append(pos)
                        cited.append(rp)
            self._edges = (
                np.asarray(citing, dtype=np.int32),
                np.asarray(cited, dtype=np.int32),
            )
        return self._edges

    def years_array(self) -> np.ndarray:
        return np.asarray([d.year for d in self.documents], dtype=np.int32)


@dataclass(frozen=True, slots=True)
class CitationIndex:
    """Reverse citation map for one corpus.

    citers maps doc_id to the sorted doc_ids citing it (entries exist only
    for cited documents and ignore any window). citation_count maps doc_id
    to in-window internal citations plus external_citations (entries exist
    only for nonzero counts).
    """

    citers: dict[str, tuple[str, ...]]
    citation_count: dict[str, int]
    window_years: int | None = None

    def count(self, doc_id: str) -> int:
        return self.citation_count.get(doc_id, 0)

    def citers_of(self, doc_id: str) -> tuple[str, ...]:
        return self.citers.get(doc_id, ())


def build_citation_index(corpus: Corpus, window_years: int | None = None) -> CitationIndex:
    """Invert the reference lists of a corpus.

    A citation is in-window when year(citing) - year(cited) <= window_years;
    with no window every internal citation counts. The citers lists are not
    windowed.
    """
    if window_years is not None and window_years < 0:
        raise ValidationError([f"window_years must be >= 0, got {window_years}"])
    citing, cited = corpus.ref_edges()
    docs = corpus.documents
    citers: dict[str, list[str]] = {}
    counts: dict[str, int] = {}
    years = corpus.years_array()
    in_window = np.ones(len(citing), dtype=bool)
    if window_years is not None and len(citing):
        in_window = (years[citing] - years[cited]) <= window_years
    for k in range(len(citing)):
        d = docs[int(citing[k])]
        r = docs[int(cited[k])]
        citers.setdefault(r.doc_id, []).append(d.doc_id)
        if in_window[k]:
            counts[r.doc_id] = counts.get(r.doc_id, 0) + 1
    for d in docs:
        if d.external_citations:
            counts[d.doc_id] = counts.get(d.doc_id, 0) + d.external_citations
    frozen = {k: tuple(v) for k, v in sorted(citers.items())}
    return CitationIndex(frozen, dict(sorted(counts.items())), window_years)


def ref_stats_by_year(corpus: Corpus, threshold: int = 3) -> list[tuple[int, float]]:
    """Per publication year, the percentage of documents with fewer than
    `threshold` references (internal and external both count).

    Returns (year, pct) pairs sorted by year; years with no documents are
    absent.
    """
    totals: dict[int, int] = {}
    below: dict[int, int] = {}
    for d in corpus.documents:
        totals[d.year] = totals.get(d.year, 0) + 1
        if len(d.references) < threshold:
            below[d.year] = below.get(d.year, 0) + 1
    return [(y, 100.0 * below.get(y, 0) / totals[y]) for y in sorted(totals)]


def corpus_summary(corpus: Corpus) -> dict:
    """JSON-ready corpus statistics: document counts and reference-count
    histograms per year, plus document-type counts."""
    years: dict[int, dict] = {}
    type_counts: dict[str, int] = {}
    for d in corpus.documents:
        y = years.setdefault(d.year, {"documents": 0, "reference_count_hist": {}})
        y["documents"] += 1
        hist = y["reference_count_hist"]
        k = str(len(d.references))
        hist[k] = hist.get(k, 0) + 1
        type_counts[d.doc_type] = type_counts.get(d.doc_type, 0) + 1
    return {
        "n_documents": len(corpus.documents),
        "n_journals": len(corpus.journals),
        "year_min": min((d.year for d in corpus.documents), default=None),
        "year_max": max((d.year for d in corpus.documents), default=None),
        "doc_types": dict(sorted(type_counts.items())),
        "years": {str(y): years[y] for y in sorted(years)},
    }


def _parse_bool(raw: str, path: str, line_no: int, column: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "1"):
        return True
    if v in ("false", "0", ""):
        return False
    raise ParseError(f"{path}: line {line_no}, column {column}: expected boolean, got {raw!r}")


def load_scheme(path: str) -> Scheme:
    """Read a scheme CSV. Raises ParseError on malformed rows (line and
    column reported) and ValidationError on invariant violations, including
    a category referencing an area no row names (dangling area)."""
    categories: list[Category] = []
    area_names: dict[str, str] = {}
    area_multi: dict[str, bool] = {}
    referenced: dict[str, int] = {}
    errors: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != SCHEME_HEADER:
            raise ParseError(f"{path}: line 1: expected header {','.join(SCHEME_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SCHEME_HEADER):
                raise ParseError(f"{path}: line {line_no}: expected {len(SCHEME_HEADER)} fields, got {len(row)}")
            code, name, area_code, area_name, raw_misc, raw_multi = (f.strip() for f in row)
            is_misc = _parse_bool(raw_misc, path, line_no, "is_misc")
            is_multi = _parse_bool(raw_multi, path, line_no, "is_multidisciplinary")
            if not area_code:
                raise ParseError(f"{path}: line {line_no}, column area_code: must not be empty")
            if area_name:
                seen_name = area_names.get(area_code)
                if seen_name is not None and seen_name != area_name:
                    errors.append(
                        f"area {area_code!r} named both {seen_name!r} and {area_name!r}"
                    )
                area_names.setdefault(area_code, area_name)
                # an area-definition row is authoritative for the multi flag;
                # category rows only set it when nothing else has
                if not code:
                    area_multi[area_code] = is_multi
                elif area_code not in area_multi:
                    area_multi[area_code] = is_multi
            else:
                referenced.setdefault(area_code, line_no)
            if code:
                categories.append(Category(code, name, area_code, is_misc))
            else:
                if is_misc:
                    errors.append(f"multidisciplinary area row {area_code!r} flagged is_misc")
                if not is_multi:
                    errors.append(
                        f"line {line_no}: row with empty code must be the multidisciplinary area"
                    )
    for area_code, line_no in referenced.items():
        if area_code not in area_names:
            errors.append(
                f"area {area_code!r} referenced (line {line_no}) but never defined with a name"
            )
    if errors:
        raise ValidationError(errors)
    areas = [
        Area(code, area_names[code], area_multi.get(code, False))
        for code in sorted(area_names)
    ]
    return Scheme(categories, areas)


def write_scheme(scheme: Scheme, path: str) -> None:
    """Canonical form: header, category rows sorted by code, then the
    multidisciplinary area row (if any) last."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCHEME_HEADER)
        for c in scheme.categories:
            area = scheme.area_by_code[c.area_code]
            writer.writerow([
                c.code, c.name, area.code, area.name,
                "true" if c.is_misc else "false", "false",
            ])
        if scheme.multi_area is not None:
            a = scheme.multi_area
            writer.writerow(["", "", a.code, a.name, "false", "true"])


def _load_jsonl(path: str) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}: record {line_no}: invalid JSON: {e.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(f"{path}: record {line_no}: expected an object")
            yield line_no, obj


def _req(obj: dict, key: str, kind: type, path: str, line_no: int):
    val = obj.get(key)
    if kind is int and isinstance(val, bool):
        val = None
    if not isinstance(val, kind):
        raise ParseError(f"{path}: record {line_no}: field {key!r} missing or not {kind.__name__}")
    return val


def load_corpus(
    journal_path: str,
    document_path: str,
    scheme: Scheme,
    year_min: int | None = None,
    year_max: int | None = None,
) -> Corpus:
    """Read journals and documents JSONL files into a validated Corpus.

    Reference lists are deduplicated and sorted on load. Document and
    reference id strings are interned into one pool so repeated references
    share memory.
    """
    journals: list[Journal] = []
    for line_no, obj in _load_jsonl(journal_path):
        jid = _req(obj, "journal_id", str, journal_path, line_no)
        codes = _req(obj, "asjc_codes", list, journal_path, line_no)
        if not all(isinstance(c, str) and c for c in codes):
            raise ParseError(f"{journal_path}: record {line_no}: asjc_codes must be non-empty strings")
        journals.append(Journal(jid, tuple(sorted(codes))))

    pool: dict[str, str] = {}
    documents: list[Document] = []
    for line_no, obj in _load_jsonl(document_path):
        doc_id = _req(obj, "doc_id", str, document_path, line_no)
        if not doc_id:
            raise ParseError(f"{document_path}: record {line_no}: empty doc_id")
        journal_id = _req(obj, "journal_id", str, document_path, line_no)
        year = _req(obj, "year", int, document_path, line_no)
        doc_type = _req(obj, "doc_type", str, document_path, line_no)
        if not doc_type:
            raise ParseError(f"{document_path}: record {line_no}: empty doc_type")
        refs = _req(obj, "references", list, document_path, line_no)
        if not all(isinstance(r, str) and r for r in refs):
            raise ParseError(f"{document_path}: record {line_no}: references must be non-empty strings")
        ext = obj.get("external_citations", 0)
        if isinstance(ext, bool) or not isinstance(ext, int) or ext < 0:
            raise ParseError(f"{document_path}: record {line_no}: external_citations must be an integer >= 0")
        doc_id = pool.setdefault(doc_id, doc_id)
        interned = tuple(sorted({pool.setdefault(r, r) for r in refs}))
        documents.append(Document(doc_id, journal_id, year, doc_type, interned, ext))

    return Corpus(scheme, journals, documents, year_min, year_max)


def write_corpus(corpus: Corpus, journal_path: str, document_path: str) -> None:
    """Canonical form: one compact JSON object per line, journals and
    documents sorted by id, references sorted, external_citations omitted
    when zero."""
    with open(journal_path, "w", encoding="utf-8", newline="\n") as fh:
        for jid in sorted(corpus.journals):
            j = corpus.journals[jid]
            fh.write(json.dumps(
                {"journal_id": j.journal_id, "asjc_codes": list(j.asjc_codes)},
                separators=(",", ":"),
            ))
            fh.write("\n")
    with open(document_path, "w", encoding="utf-8", newline="\n") as fh:
        for d in corpus.documents:
            obj: dict = {
                "doc_id": d.doc_id,
                "journal_id": d.journal_id,
                "year": d.year,
                "doc_type": d.doc_type,
                "references": list(d.references),
            }
            if d.external_citations:
                obj["external_citations"] = d.external_citations
            fh.write(json.dumps(obj, separators=(",", ":")))
            fh.write("\n")
