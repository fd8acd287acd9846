"""Item-level classification from the origin of citing documents (U1-F-0.8).

Each reference of a document gets a profile: the mean journal-based vector
of the documents citing that reference, excluding the document being
classified. A reference with no other citers falls back to its own journal
vector; a reference outside the corpus contributes nothing. The document's
aggregate (mean over non-empty reference profiles) is cut to the categories
within a relative threshold of the heaviest one, capped at a maximum
support size, and renormalized. Documents with too few references, or with
an empty aggregate, keep their journal-based vector unchanged (the same
dict object, so they serialize identically).

classify_u1f08 is the per-document route; classify_u1f08_all computes the
same result for a whole corpus through sparse matrix products. For every
reference r with windowed citer vectors summing to S_r, the profile seen by
a citing document d is (S_r - A_d) / (n_r - 1) because d itself is always
among the citers it must be excluded from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .assignments import Assignment, AssignmentSet, SYSTEM_U1
from .corpus import CitationIndex, Corpus, Document, ValidationError
from .weights import CategoryVector, mean_of, normalize


@dataclass(frozen=True, slots=True)
class ThresholdPolicy:
    theta: float = 0.8
    max_categories: int = 5
    min_references: int = 3

    def __post_init__(self):
        errors = []
        if not (0.0 < self.theta <= 1.0):
            errors.append(f"theta must be in (0, 1], got {self.theta}")
        if self.max_categories < 1:
            errors.append(f"max_categories must be >= 1, got {self.max_categories}")
        if self.min_references < 0:
            errors.append(f"min_references must be >= 0, got {self.min_references}")
        if errors:
            raise ValidationError(errors)


def reference_profile(
    ref_id: str,
    exclude_doc_id: str,
    corpus: Corpus,
    index: CitationIndex,
    asjc_set: AssignmentSet,
    citer_window: int | None = None,
) -> CategoryVector:
    """Profile of one reference as seen from the document being classified.

    Returns {} for a reference outside the corpus. Returned vectors may be
    shared objects; treat them as read-only.
    """
    if ref_id not in corpus:
        return {}
    ref_year = corpus.doc(ref_id).year
    chosen: list[CategoryVector] = []
    for c in index.citers_of(ref_id):
        if c == exclude_doc_id:
            continue
        if citer_window is not None and corpus.doc(c).year - ref_year > citer_window:
            continue
        chosen.append(asjc_set.vectors[c])
    if not chosen:
        return asjc_set.vectors[ref_id]
    return mean_of(chosen)


def aggregate_references(profiles: list[CategoryVector]) -> CategoryVector:
    """Mean over the non-empty reference profiles; {} if all are empty."""
    non_empty = [p for p in profiles if p]
    if not non_empty:
        return {}
    return mean_of(non_empty)


def apply_threshold(vec: CategoryVector, policy: ThresholdPolicy) -> CategoryVector:
    """Keep categories with weight >= theta * max weight, cap the support at
    max_categories heaviest (ties broken by category code), renormalize.
    The rule is scale-invariant, so the input need not be normalized."""
    if not vec:
        raise ValidationError(["cannot threshold an empty vector"])
    wmax = max(vec.values())
    if wmax <= 0.0:
        raise ValidationError(["cannot threshold a vector with no positive weight"])
    cut = policy.theta * wmax
    kept = {k: w for k, w in vec.items() if w >= cut}
    if len(kept) > policy.max_categories:
        ranked = sorted(kept.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = dict(ranked[: policy.max_categories])
    return normalize(kept)


def classify_u1f08(
    doc: Document,
    corpus: Corpus,
    index: CitationIndex,
    asjc_set: AssignmentSet,
    policy: ThresholdPolicy = ThresholdPolicy(),
    citer_window: int | None = None,
) -> Assignment:
    """Classify one document. Results never depend on other documents'
    U1-F-0.8 assignments, only on journal-based vectors."""
    if len(doc.references) < policy.min_references:
        return Assignment(doc.doc_id, SYSTEM_U1, asjc_set.vectors[doc.doc_id])
    profiles = [
        reference_profile(r, doc.doc_id, corpus, index, asjc_set, citer_window)
        for r in doc.references
    ]
    agg = aggregate_references(profiles)
    if not agg:
        return Assignment(doc.doc_id, SYSTEM_U1, asjc_set.vectors[doc.doc_id])
    return Assignment(doc.doc_id, SYSTEM_U1, apply_threshold(agg, policy))


def _journal_rows(corpus: Corpus, asjc_set: AssignmentSet) -> tuple[np.ndarray, list[CategoryVector]]:
    """Map each document to its journal's vector row, verifying the set is
    journal-constant and covers the corpus."""
    n = len(corpus.documents)
    u = np.empty(n, dtype=np.int32)
    row_of_journal: dict[str, int] = {}
    rows: list[CategoryVector] = []
    for i, d in enumerate(corpus.documents):
        vec = asjc_set.vectors.get(d.doc_id)
        if vec is None:
            raise ValidationError([f"no journal-based assignment for document {d.doc_id!r}"])
        r = row_of_journal.get(d.journal_id)
        if r is None:
            r = len(rows)
            row_of_journal[d.journal_id] = r
            rows.append(vec)
        elif rows[r] is not vec and rows[r] != vec:
            raise ValidationError(
                [f"journal-based assignments are not constant within journal {d.journal_id!r}"]
            )
        u[i] = r
    return u, rows


def classify_u1f08_all(
    corpus: Corpus,
    asjc_set: AssignmentSet,
    policy: ThresholdPolicy = ThresholdPolicy(),
    citer_window: int | None = None,
    chunk_size: int = 65536,
) -> AssignmentSet:
    """Batch equivalent of classify_u1f08 over all documents of a corpus."""
    docs = corpus.documents
    n = len(docs)
    out: dict[str, CategoryVector] = {}
    if n == 0:
        return AssignmentSet(SYSTEM_U1, out)

    u, rows = _journal_rows(corpus, asjc_set)
    codes: set[str] = set()
    for vec in rows:
        codes.update(vec)
    cols = sorted(codes)
    col_of = {c: j for j, c in enumerate(cols)}
    m = len(cols)

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for vec in rows:
        for k in sorted(vec):
            indices.append(col_of[k])
            data.append(vec[k])
        indptr.append(len(indices))
    V = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int64)),
        shape=(len(rows), max(m, 1)),
    )
    A = V[u]

    citing, cited = corpus.ref_edges()
    ne = len(citing)
    k_internal = np.bincount(citing, minlength=n)
    if citer_window is not None and ne:
        years = corpus.years_array()
        in_window = (years[citing] - years[cited]) <= citer_window
    else:
        in_window = np.ones(ne, dtype=bool)
    n_cit = np.bincount(cited[in_window], minlength=n)

    Cw = sparse.csr_matrix(
        (np.ones(int(in_window.sum())), (cited[in_window], citing[in_window])),
        shape=(n, n),
    )
    S = Cw @ A  # S[r] = sum of windowed citer vectors of reference r

    ncr = n_cit[cited] if ne else np.zeros(0, dtype=np.int64)
    alpha = np.zeros(ne)
    subtract = in_window & (ncr >= 2)
    alpha[subtract] = 1.0 / (ncr[subtract] - 1)
    outside = ~in_window & (ncr >= 1)
    alpha[outside] = 1.0 / ncr[outside]
    fallback_edge = (in_window & (ncr == 1)) | (~in_window & (ncr == 0))

    for i0 in range(0, n, chunk_size):
        i1 = min(i0 + chunk_size, n)
        cn = i1 - i0
        lo, hi = np.searchsorted(citing, (i0, i1))
        ld = citing[lo:hi] - i0
        e_r = cited[lo:hi]
        e_alpha = alpha[lo:hi]
        e_fall = fallback_edge[lo:hi]
        e_sub = subtract[lo:hi]

        keep = ~e_fall
        Magg = sparse.csr_matrix((e_alpha[keep], (ld[keep], e_r[keep])), shape=(cn, n))
        dense = (Magg @ S).toarray()
        csub = np.bincount(ld[e_sub], weights=e_alpha[e_sub], minlength=cn)
        if csub.any():
            dense -= csub[:, None] * A[i0:i1].toarray()
        if e_fall.any():
            Mf = sparse.csr_matrix(
                (np.ones(int(e_fall.sum())), (ld[e_fall], u[e_r[e_fall]])),
                shape=(cn, V.shape[0]),
            )
            dense += (Mf @ V).toarray()
        kc = k_internal[i0:i1].astype(np.float64)
        np.divide(dense, kc[:, None], out=dense, where=kc[:, None] > 0)
        np.maximum(dense, 0.0, out=dense)

        for j in range(cn):
            d = docs[i0 + j]
            if len(d.references) < policy.min_references or k_internal[i0 + j] == 0:
                out[d.doc_id] = asjc_set.vectors[d.doc_id]
                continue
            row = dense[j]
            nz = np.nonzero(row > 1e-15)[0]
            if nz.size == 0:
                out[d.doc_id] = asjc_set.vectors[d.doc_id]
                continue
            agg = {cols[c]: float(row[c]) for c in nz}
            out[d.doc_id] = apply_threshold(agg, policy)

    return AssignmentSet(SYSTEM_U1, out)
