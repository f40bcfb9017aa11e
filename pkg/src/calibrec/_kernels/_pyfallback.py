"""Pure-Python kernels, used when the compiled core is not available.

These mirror ``_core.pyx`` operation for operation: both backends perform the
same IEEE-754 double arithmetic in the same order, so their outputs are
bit-identical (the extension is compiled with FMA contraction disabled).
The compiled core exists purely for speed; see benchmarks/bench_kernels.py.
"""

from math import log, log2


def sgd_epoch(users, items, ratings, order, global_mean, bu, bi, pu, qi, lr, reg):
    """One in-place SGD pass over the ratings, visiting them in ``order``.

    users/items are row indices into the bias vectors and factor matrices;
    pu and qi are (n_users x f) and (n_items x f) factor matrices, updated
    in place together with the bias vectors.
    """
    n_factors = pu.shape[1]
    users_l = users.tolist()
    items_l = items.tolist()
    ratings_l = ratings.tolist()
    order_l = order.tolist()
    bu_l = bu.tolist()
    bi_l = bi.tolist()
    pu_l = pu.tolist()
    qi_l = qi.tolist()
    mu = float(global_mean)
    lr = float(lr)
    reg = float(reg)

    for t in order_l:
        u = users_l[t]
        i = items_l[t]
        p_row = pu_l[u]
        q_row = qi_l[i]
        dot = 0.0
        for f in range(n_factors):
            dot += p_row[f] * q_row[f]
        err = ratings_l[t] - (mu + bu_l[u] + bi_l[i] + dot)
        bu_l[u] += lr * (err - reg * bu_l[u])
        bi_l[i] += lr * (err - reg * bi_l[i])
        for f in range(n_factors):
            puf = p_row[f]
            qif = q_row[f]
            p_row[f] = puf + lr * (err * qif - reg * puf)
            q_row[f] = qif + lr * (err * puf - reg * qif)

    bu[:] = bu_l
    bi[:] = bi_l
    pu[:] = pu_l
    qi[:] = qi_l


def greedy_rerank(scores, props, pref, lam, alpha, n_select,
                  divergence, use_blend, eps):
    """Greedy position-by-position list construction under the trade-off
    objective (1-lam)*ndcg(prefix) - lam*div(pref, blended list distribution).

    scores: predicted scores of the candidates, in (score desc, id asc) order.
    props: dense (n_candidates x n_genres) genre-proportion rows.
    Returns the selected candidate indices in selection order.

    Ties in the objective keep the earliest candidate, which under the input
    ordering implements the (higher score, then lower item id) tie-break.
    """
    scores_l = scores.tolist()
    props_l = props.tolist()
    pref_l = pref.tolist()
    n_cand = len(scores_l)
    n_genres = len(pref_l)
    lam = float(lam)
    alpha = float(alpha)
    eps = float(eps)
    kl_mode = divergence == 1
    one_minus_lam = 1.0 - lam

    chosen = [False] * n_cand
    num = [0.0] * n_genres
    den = [0.0] * n_genres
    qt = [0.0] * n_genres
    dcg = 0.0
    sorted_scores = []
    selected = []

    for step in range(n_select):
        disc = log2(step + 2.0)
        best = -1
        best_obj = 0.0
        for c in range(n_cand):
            if chosen[c]:
                continue
            s = scores_l[c]
            row = props_l[c]
            gain = pow(2.0, s) - 1.0

            new_dcg = dcg + gain / disc
            idcg = 0.0
            inserted = False
            pos = 0
            for v in sorted_scores:
                if not inserted and s > v:
                    idcg += gain / log2(pos + 2.0)
                    pos += 1
                    inserted = True
                idcg += (pow(2.0, v) - 1.0) / log2(pos + 2.0)
                pos += 1
            if not inserted:
                idcg += gain / log2(pos + 2.0)
            ndcg = 1.0 if idcg == 0.0 else new_dcg / idcg

            if kl_mode:
                sum_p = 0.0
                sum_qt = 0.0
                for g in range(n_genres):
                    pr = row[g]
                    if pr > 0.0:
                        qn = num[g] + s * pr
                        qd = den[g] + s
                    else:
                        qn = num[g]
                        qd = den[g]
                    q = qn / qd if qd > 0.0 else 0.0
                    p = pref_l[g]
                    v = (1.0 - alpha) * q + alpha * p if use_blend else q
                    qt[g] = v
                    sum_p += p
                    sum_qt += v
                div = 0.0
                if sum_p > 0.0:
                    for g in range(n_genres):
                        p = pref_l[g]
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
                    pr = row[g]
                    if pr > 0.0:
                        qn = num[g] + s * pr
                        qd = den[g] + s
                    else:
                        qn = num[g]
                        qd = den[g]
                    q = qn / qd if qd > 0.0 else 0.0
                    p = pref_l[g]
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

        s = scores_l[best]
        row = props_l[best]
        for g in range(n_genres):
            pr = row[g]
            if pr > 0.0:
                num[g] += s * pr
                den[g] += s
        dcg += (pow(2.0, s) - 1.0) / disc
        pos = 0
        while pos < len(sorted_scores) and s <= sorted_scores[pos]:
            pos += 1
        sorted_scores.insert(pos, s)
        chosen[best] = True
        selected.append(best)

    return selected
