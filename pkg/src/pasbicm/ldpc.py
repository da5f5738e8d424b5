"""Quasi-cyclic LDPC codec: base-graph data, lifting, encoding, decoding.

Base graphs ship as versioned CSV data files (one line per nonzero entry
with eight per-set shift coefficients) together with the table of
supported lifting sizes.  Lifting expands each entry into a Z x Z cyclic
permutation block; block (r, c) with shift s maps position i to column
c*Z + (i + s) mod Z.

Encoding is systematic.  The first few parity columns (the ones with
block degree above one) form a small core whose packed-GF(2) inverse is
precomputed at lift time; the remaining parity columns are degree-one
accumulator outputs filled by forward substitution.  Decoding is
normalized min-sum (factor 0.75) with a flooding schedule, early stop on
a zero syndrome, and message saturation at +/-30.
"""

from importlib import resources

import numpy as np
import scipy.sparse as sp
from numba import njit, prange

BG1 = "BG1"
BG2 = "BG2"
_EXPECTED = {BG1: (46, 68, 22, 316), BG2: (42, 52, 10, 197)}

LLR_CLIP = 30.0


class BaseGraphError(ValueError):
    """Malformed base-graph data or unsupported lifting size."""


class BaseGraph:
    """Sparse base matrix with per-entry shift coefficients.

    shift_table maps (row, col) to either an eight-element per-set array
    (the shipped graphs) or a plain integer applied at every lifting size
    (convenient for small hand-built test graphs).
    """

    def __init__(self, rows, cols, sys_cols, shift_table, kind="custom"):
        self.rows = rows
        self.cols = cols
        self.sys_cols = sys_cols
        self.kind = kind
        self.shift_table = dict(shift_table)
        for (r, c) in self.shift_table:
            if not (0 <= r < rows and 0 <= c < cols):
                raise BaseGraphError(f"entry ({r},{c}) outside a {rows}x{cols} graph")

    @property
    def nnz(self):
        return len(self.shift_table)

    def shift_for(self, r, c, set_index):
        v = self.shift_table[(r, c)]
        return int(v[set_index]) if np.ndim(v) else int(v)


def _data_path(name):
    return resources.files("pasbicm").joinpath("data", name)


def load_lifting_sizes():
    """Lifting-size table: list of sorted size lists indexed by set."""
    sets = []
    with _data_path("nr_lifting_sizes.csv").open() as f:
        for line in f:
            fields = line.strip().split(",")
            if int(fields[0]) != len(sets):
                raise BaseGraphError("lifting-size table rows out of order")
            sets.append([int(v) for v in fields[1:]])
    return sets


def lifting_set_index(Z):
    for i, sizes in enumerate(load_lifting_sizes()):
        if Z in sizes:
            return i
    raise BaseGraphError(f"unsupported lifting size {Z}")


def load_base_graph(kind) -> BaseGraph:
    """Load a shipped base graph, validating shape and entry count."""
    if kind not in _EXPECTED:
        raise BaseGraphError(f"unknown base graph {kind!r}")
    rows_exp, cols_exp, sys_cols, nnz_exp = _EXPECTED[kind]
    table = {}
    with _data_path(f"nr_ldpc_{kind.lower()}.csv").open() as f:
        header = f.readline().strip().split(",")
        if len(header) != 4 or header[0] != kind:
            raise BaseGraphError(f"bad header in {kind} data file: {header}")
        if (int(header[1]), int(header[2])) != (rows_exp, cols_exp):
            raise BaseGraphError(f"{kind} dimensions {header[1]}x{header[2]} unexpected")
        for line in f:
            fields = [int(v) for v in line.strip().split(",")]
            if len(fields) != 10:
                raise BaseGraphError(f"{kind} entry with {len(fields)} fields")
            r, c, shifts = fields[0], fields[1], np.array(fields[2:])
            if np.any(shifts < 0):
                raise BaseGraphError(f"negative shift at ({r},{c})")
            table[(r, c)] = shifts
    if len(table) != nnz_exp or len(table) != int(header[3]):
        raise BaseGraphError(
            f"{kind} carries {len(table)} entries, expected {nnz_exp}"
        )
    return BaseGraph(rows_exp, cols_exp, sys_cols, table, kind=kind)


# ---------------------------------------------------------------------------
# packed GF(2) helpers for the encoder core

def _pack_bits(mat):
    """Pack a (n, m) 0/1 matrix into (n, ceil(m/64)) uint64 words."""
    n, m = mat.shape
    words = (m + 63) // 64
    padded = np.zeros((n, words * 64), dtype=np.uint8)
    padded[:, :m] = mat
    chunks = padded.reshape(n, words, 64).astype(np.uint64)
    return (chunks << np.arange(64, dtype=np.uint64)).sum(axis=2, dtype=np.uint64)


def _gf2_inverse_packed(mat):
    """Inverse of a square 0/1 matrix as packed rows; raises if singular."""
    n = mat.shape[0]
    aug = np.concatenate([mat, np.eye(n, dtype=np.uint8)], axis=1)
    rows = _pack_bits(aug)
    words = rows.shape[1]
    for col in range(n):
        w, b = col // 64, np.uint64(col % 64)
        mask = (rows[col:, w] >> b) & np.uint64(1)
        pivots = np.flatnonzero(mask)
        if pivots.size == 0:
            raise BaseGraphError("parity core is singular; cannot encode")
        p = col + pivots[0]
        if p != col:
            rows[[col, p]] = rows[[p, col]]
        hits = np.flatnonzero((rows[:, w] >> b) & np.uint64(1))
        hits = hits[hits != col]
        rows[hits] ^= rows[col]
    # unpack the right half
    out = np.zeros((n, n), dtype=np.uint8)
    for col in range(n):
        src = n + col
        w, b = src // 64, np.uint64(src % 64)
        out[:, col] = ((rows[:, w] >> b) & np.uint64(1)).astype(np.uint8)
    return out


class LiftedCode:
    """A base graph lifted by Z, ready for encoding and decoding."""

    def __init__(self, base: BaseGraph, Z: int, set_index=None):
        if Z < 1:
            raise BaseGraphError(f"invalid lifting size {Z}")
        if set_index is None and base.kind in _EXPECTED:
            set_index = lifting_set_index(Z)
        self.base = base
        self.Z = Z
        self.set_index = 0 if set_index is None else set_index
        self.n_rows = base.rows * Z
        self.n_cols = base.cols * Z
        self.k_sys = base.sys_cols * Z
        self.entries = [
            (r, c, base.shift_for(r, c, self.set_index) % Z)
            for (r, c) in sorted(base.shift_table)
        ]
        self._build_sparse()
        self._build_encoder()

    def _build_sparse(self):
        Z = self.Z
        i = np.arange(Z)
        rows, cols = [], []
        for (r, c, s) in self.entries:
            rows.append(r * Z + i)
            cols.append(c * Z + (i + s) % Z)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.ones(rows.size, dtype=np.uint8)
        self.H = sp.csr_matrix((data, (rows, cols)), shape=(self.n_rows, self.n_cols))
        # flat CSR edge arrays for the message-passing kernel
        self.check_ptr = self.H.indptr.astype(np.int32)
        self.edge_col = self.H.indices.astype(np.int32)

    def _build_encoder(self):
        Z = self.Z
        sys_cols = self.base.sys_cols
        parity_cols = range(sys_cols, self.base.cols)
        col_deg = {c: 0 for c in parity_cols}
        for (_, c, _) in self.entries:
            if c >= sys_cols:
                col_deg[c] += 1
        self._core_cols = [c for c in parity_cols if col_deg[c] > 1]
        ext_cols = [c for c in parity_cols if col_deg[c] == 1]
        ext_of_row = {}
        for (r, c, s) in self.entries:
            if c in ext_cols:
                if r in ext_of_row:
                    raise BaseGraphError("two accumulator columns on one row")
                ext_of_row[r] = (c, s)
        self._ext_of_row = ext_of_row
        core_set = set(c for c in parity_cols if col_deg[c] > 1)
        self._ext_core_terms = {
            r: [(c2, s2) for (r2, c2, s2) in self.entries if r2 == r and c2 in core_set]
            for r in ext_of_row
        }
        self._core_rows = [r for r in range(self.base.rows) if r not in ext_of_row]
        for (r, c, _) in self.entries:
            if r in self._core_rows and c >= sys_cols and c not in self._core_cols:
                raise BaseGraphError("core row touches an accumulator column")
        if len(self._core_rows) != len(self._core_cols):
            raise BaseGraphError("parity core is not square")
        nc = len(self._core_cols)
        if nc == 0:
            self._core_inv = None
            return
        core = np.zeros((nc * Z, nc * Z), dtype=np.uint8)
        col_pos = {c: j for j, c in enumerate(self._core_cols)}
        row_pos = {r: j for j, r in enumerate(self._core_rows)}
        i = np.arange(Z)
        for (r, c, s) in self.entries:
            if r in row_pos and c in col_pos:
                core[row_pos[r] * Z + i, col_pos[c] * Z + (i + s) % Z] = 1
        # float32 matmul keeps the per-frame solve cheap; the row sums stay
        # well inside the exact-integer range of float32
        self._core_inv = _gf2_inverse_packed(core).astype(np.float32)

    def _lambda(self, sys_blocks):
        """Per-row syndrome contribution of the systematic part."""
        Z = self.Z
        lam = np.zeros((self.base.rows, Z), dtype=np.uint8)
        for (r, c, s) in self.entries:
            if c < self.base.sys_cols:
                lam[r] ^= np.roll(sys_blocks[c], -s)
        return lam

    def encode(self, info):
        """Systematic codeword [info | parity] for a length-k_sys input."""
        info = np.asarray(info, dtype=np.uint8)
        if info.size != self.k_sys:
            raise ValueError(f"expected {self.k_sys} systematic bits, got {info.size}")
        Z = self.Z
        sys_blocks = info.reshape(self.base.sys_cols, Z)
        lam = self._lambda(sys_blocks)
        codeword = np.zeros(self.n_cols, dtype=np.uint8)
        codeword[: self.k_sys] = info
        # solve the parity core
        if self._core_inv is not None:
            rhs = np.concatenate([lam[r] for r in self._core_rows])
            p_core = (self._core_inv @ rhs.astype(np.float32)).astype(np.int64) & 1
            p_core = p_core.astype(np.uint8)
            for j, c in enumerate(self._core_cols):
                codeword[c * Z:(c + 1) * Z] = p_core[j * Z:(j + 1) * Z]
        # accumulator columns by forward substitution
        for r, (c, s) in self._ext_of_row.items():
            rhs = lam[r]
            for (c2, s2) in self._ext_core_terms[r]:
                rhs = rhs ^ np.roll(codeword[c2 * Z:(c2 + 1) * Z], -s2)
            codeword[c * Z:(c + 1) * Z] = np.roll(rhs, s)
        return codeword

    def syndrome(self, codeword):
        return np.asarray((self.H @ codeword) % 2, dtype=np.uint8)

    def decode(self, llr, max_iter=50, alpha=0.75):
        """Min-sum decode of one LLR vector (positive means bit 0).

        Returns (bits, converged, iterations); hard decisions cover every
        column including punctured ones.
        """
        llr = np.asarray(llr, dtype=np.float32)
        if llr.size != self.n_cols:
            raise ValueError(f"expected {self.n_cols} LLRs, got {llr.size}")
        if max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        hard, conv, iters = _decode_kernel(
            llr[None, :], self.edge_col, self.check_ptr,
            int(max_iter), np.float32(alpha),
        )
        return hard[0], bool(conv[0]), int(iters[0])

    def decode_batch(self, llrs, max_iter=50, alpha=0.75):
        """Frame-parallel min-sum decode of a (batch, n_cols) LLR array."""
        llrs = np.ascontiguousarray(llrs, dtype=np.float32)
        hard, conv, iters = _decode_kernel(
            llrs, self.edge_col, self.check_ptr, int(max_iter), np.float32(alpha)
        )
        return hard, conv.astype(bool), iters


def lift(base: BaseGraph, Z: int) -> LiftedCode:
    return LiftedCode(base, Z)


@njit(parallel=True, fastmath=True, cache=True)
def _decode_kernel(llrs, edge_col, check_ptr, max_iter, alpha):
    n_frames, n = llrs.shape
    n_edges = edge_col.size
    n_checks = check_ptr.size - 1
    hard = np.zeros((n_frames, n), dtype=np.uint8)
    conv = np.zeros(n_frames, dtype=np.uint8)
    iters = np.zeros(n_frames, dtype=np.int32)
    clip = np.float32(LLR_CLIP)
    for f in prange(n_frames):
        msg = np.zeros(n_edges, dtype=np.float32)
        total = np.empty(n, dtype=np.float32)
        for j in range(n):
            v = llrs[f, j]
            if v > clip:
                v = clip
            elif v < -clip:
                v = -clip
            total[j] = v
        done = 0
        n_it = max_iter
        for it in range(max_iter):
            # check-node update: stash clamped v->c messages, then write
            # back the normalized min magnitudes with product signs
            for r in range(n_checks):
                lo, hi = check_ptr[r], check_ptr[r + 1]
                min1 = np.float32(1e30)
                min2 = np.float32(1e30)
                sign = np.float32(1.0)
                arg = -1
                for e in range(lo, hi):
                    q = total[edge_col[e]] - msg[e]
                    if q > clip:
                        q = clip
                    elif q < -clip:
                        q = -clip
                    msg[e] = q
                    if q < 0.0:
                        sign = -sign
                        q = -q
                    if q < min1:
                        min2 = min1
                        min1 = q
                        arg = e
                    elif q < min2:
                        min2 = q
                for e in range(lo, hi):
                    q = msg[e]
                    s = sign if q >= 0.0 else -sign
                    msg[e] = alpha * s * (min2 if e == arg else min1)
            # refresh totals
            for j in range(n):
                v = llrs[f, j]
                if v > clip:
                    v = clip
                elif v < -clip:
                    v = -clip
                total[j] = v
            for e in range(n_edges):
                total[edge_col[e]] += msg[e]
            # syndrome check on hard decisions; a bit with an exactly zero
            # total is undecided, which blocks convergence
            ok = 1
            for r in range(n_checks):
                par = 0
                for e in range(check_ptr[r], check_ptr[r + 1]):
                    t = total[edge_col[e]]
                    if t < 0.0:
                        par ^= 1
                    elif t == 0.0:
                        ok = 0
                if par:
                    ok = 0
                if not ok:
                    break
            if ok:
                done = 1
                n_it = it + 1
                break
        for j in range(n):
            hard[f, j] = 1 if total[j] < 0.0 else 0
        conv[f] = done
        iters[f] = n_it
    return hard, conv, iters
