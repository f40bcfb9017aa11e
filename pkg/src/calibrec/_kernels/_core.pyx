# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the two hot loops: the SGD training pass and the
greedy trade-off re-ranking. Mirrors ``_pyfallback`` exactly; compiled with
-ffp-contract=off so both backends produce bit-identical doubles.
"""

from libc.math cimport log, log2, pow
from libc.stdlib cimport free, malloc


def sgd_epoch(long[::1] users, long[::1] items, double[::1] ratings,
              long[::1] order, double global_mean,
              double[::1] bu, double[::1] bi,
              double[:, ::1] pu, double[:, ::1] qi,
              double lr, double reg):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t n_factors = pu.shape[1]
    cdef Py_ssize_t t, f
    cdef long idx, u, i
    cdef double dot, err, puf, qif

    for t in range(n):
        idx = order[t]
        u = users[idx]
        i = items[idx]
        dot = 0.0
        for f in range(n_factors):
            dot += pu[u, f] * qi[i, f]
        err = ratings[idx] - (global_mean + bu[u] + bi[i] + dot)
        bu[u] += lr * (err - reg * bu[u])
        bi[i] += lr * (err - reg * bi[i])
        for f in range(n_factors):
            puf = pu[u, f]
            qif = qi[i, f]
            pu[u, f] = puf + lr * (err * qif - reg * puf)
            qi[i, f] = qif + lr * (err * puf - reg * qif)


def greedy_rerank(double[::1] scores, double[:, ::1] props, double[::1] pref,
                  double lam, double alpha, int n_select,
                  int divergence, bint use_blend, double eps):
    cdef Py_ssize_t n_cand = scores.shape[0]
    cdef Py_ssize_t n_genres = pref.shape[0]
    cdef bint kl_mode = divergence == 1
    cdef double one_minus_lam = 1.0 - lam

    cdef unsigned char *chosen = <unsigned char *> malloc(n_cand)
    cdef double *num = <double *> malloc(n_genres * sizeof(double))
    cdef double *den = <double *> malloc(n_genres * sizeof(double))
    cdef double *qt = <double *> malloc(n_genres * sizeof(double))
    cdef double *sorted_scores = <double *> malloc(n_select * sizeof(double))
    if chosen == NULL or num == NULL or den == NULL or qt == NULL or sorted_scores == NULL:
        free(chosen); free(num); free(den); free(qt); free(sorted_scores)
        raise MemoryError()

    cdef Py_ssize_t step, c, g, t, pos, n_sorted = 0, best
    cdef double disc, best_obj, s, gain, new_dcg, idcg, ndcg, v
    cdef double qn, qd, q, p, pr, m, d, div, obj, pn, sum_p, sum_qt
    cdef double dcg = 0.0
    cdef bint inserted

    for c in range(n_cand):
        chosen[c] = 0
    for g in range(n_genres):
        num[g] = 0.0
        den[g] = 0.0
        qt[g] = 0.0

    selected = []
    try:
        for step in range(n_select):
            disc = log2(step + 2.0)
            best = -1
            best_obj = 0.0
            for c in range(n_cand):
                if chosen[c]:
                    continue
                s = scores[c]
                gain = pow(2.0, s) - 1.0

                new_dcg = dcg + gain / disc
                idcg = 0.0
                inserted = 0
                pos = 0
                for t in range(n_sorted):
                    v = sorted_scores[t]
                    if not inserted and s > v:
                        idcg += gain / log2(pos + 2.0)
                        pos += 1
                        inserted = 1
                    idcg += (pow(2.0, v) - 1.0) / log2(pos + 2.0)
                    pos += 1
                if not inserted:
                    idcg += gain / log2(pos + 2.0)
                ndcg = 1.0 if idcg == 0.0 else new_dcg / idcg

                if kl_mode:
                    sum_p = 0.0
                    sum_qt = 0.0
                    for g in range(n_genres):
                        pr = props[c, g]
                        if pr > 0.0:
                            qn = num[g] + s * pr
                            qd = den[g] + s
                        else:
                            qn = num[g]
                            qd = den[g]
                        q = qn / qd if qd > 0.0 else 0.0
                        p = pref[g]
                        v = (1.0 - alpha) * q + alpha * p if use_blend else q
                        qt[g] = v
                        sum_p += p
                        sum_qt += v
                    div = 0.0
                    if sum_p > 0.0:
                        for g in range(n_genres):
                            p = pref[g]
                            if p <= 0.0:
                                continue
                            pn = p / sum_p
                            qn = qt[g] / sum_qt if sum_qt > 0.0 else 0.0
                            if qn < eps:
                                qn = eps
                            div += pn * log(pn / qn)
                else:
                    div = 0.0
                    for g in range(n_genres):
                        pr = props[c, g]
                        if pr > 0.0:
                            qn = num[g] + s * pr
                            qd = den[g] + s
                        else:
                            qn = num[g]
                            qd = den[g]
                        q = qn / qd if qd > 0.0 else 0.0
                        p = pref[g]
                        v = (1.0 - alpha) * q + alpha * p if use_blend else q
                        if p == 0.0 and v == 0.0:
                            continue
                        m = p if p < v else v
                        if m < eps:
                            m = eps
                        d = p - v
                        div += (d * d) / (m * m)

                obj = one_minus_lam * ndcg - lam * div
                if best < 0 or obj > best_obj:
                    best = c
                    best_obj = obj

            s = scores[best]
            for g in range(n_genres):
                pr = props[best, g]
                if pr > 0.0:
                    num[g] += s * pr
                    den[g] += s
            dcg += (pow(2.0, s) - 1.0) / disc
            pos = 0
            while pos < n_sorted and s <= sorted_scores[pos]:
                pos += 1
            for t in range(n_sorted, pos, -1):
                sorted_scores[t] = sorted_scores[t - 1]
            sorted_scores[pos] = s
            n_sorted += 1
            chosen[best] = 1
            selected.append(best)
    finally:
        free(chosen)
        free(num)
        free(den)
        free(qt)
        free(sorted_scores)

    return selected
