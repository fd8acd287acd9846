"""Journal-based fractional classification.

Every document inherits its journal's category profile: each code listed by
the journal gets weight 1/k. Weight on the multidisciplinary area code is
split equally over all non-misc categories of the scheme; weight on a misc
category is split equally over the non-misc categories of its own area. The
result is normalized and pruned.
"""

from __future__ import annotations

from .assignments import Assignment, AssignmentSet, SYSTEM_ASJC
from .corpus import Corpus, Document, Journal, Scheme, ValidationError
from .weights import CategoryVector, PRUNE_EPS, normalize


def journal_base_weights(journal: Journal, scheme: Scheme) -> CategoryVector:
    """Raw journal profile: 1/k to each listed code, before redistribution."""
    codes = journal.asjc_codes
    if not codes:
        raise ValidationError([f"journal {journal.journal_id!r} has no codes"])
    for code in codes:
        if not scheme.is_assignable_code(code):
            raise ValidationError(
                [f"journal {journal.journal_id!r} carries unknown code {code!r}"]
            )
    w = 1.0 / len(codes)
    return {code: w for code in sorted(codes)}


def redistribute(vector: CategoryVector, scheme: Scheme) -> CategoryVector:
    """Resolve multidisciplinary and misc weight onto regular categories.

    A vector already free of such entries is returned as a pruned sorted
    copy with values untouched, so the operation is exactly idempotent.
    """
    multi_code = scheme.multi_area.code if scheme.multi_area is not None else None
    special = False
    for code in vector:
        if code == multi_code:
            special = True
        else:
            cat = scheme.category_by_code.get(code)
            if cat is None:
                raise ValidationError([f"cannot redistribute unknown code {code!r}"])
            if cat.is_misc:
                special = True
    if not special:
        return {k: v for k, v in sorted(vector.items()) if v >= PRUNE_EPS}

    acc: dict[str, float] = {}
    for code, w in vector.items():
        if code == multi_code:
            targets = scheme.non_misc_codes
            if not targets:
                raise ValidationError(["no non-misc categories to receive multidisciplinary weight"])
        else:
            cat = scheme.category_by_code[code]
            if cat.is_misc:
                targets = scheme.non_misc_by_area[cat.area_code]
                if not targets:
                    raise ValidationError(
                        [f"area {cat.area_code!r} has no non-misc categories for misc weight"]
                    )
            else:
                acc[code] = acc.get(code, 0.0) + w
                continue
        share = w / len(targets)
        for t in targets:
            acc[t] = acc.get(t, 0.0) + share
    return normalize(acc)


def journal_vector(journal: Journal, scheme: Scheme) -> CategoryVector:
    return redistribute(journal_base_weights(journal, scheme), scheme)


def classify_asjc_fractional(doc: Document, corpus: Corpus, scheme: Scheme) -> Assignment:
    journal = corpus.journals.get(doc.journal_id)
    if journal is None:
        raise ValidationError([f"document {doc.doc_id!r} references unknown journal {doc.journal_id!r}"])
    return Assignment(doc.doc_id, SYSTEM_ASJC, journal_vector(journal, scheme))


def classify_asjc(corpus: Corpus, scheme: Scheme) -> AssignmentSet:
    """Classify every document. Documents of the same journal share one
    weights dict (the vector depends only on the journal)."""
    cache: dict[str, CategoryVector] = {}
    vectors: dict[str, CategoryVector] = {}
    for d in corpus.documents:
        vec = cache.get(d.journal_id)
        if vec is None:
            vec = journal_vector(corpus.journals[d.journal_id], scheme)
            cache[d.journal_id] = vec
        vectors[d.doc_id] = vec
    return AssignmentSet(SYSTEM_ASJC, vectors)
