"""Packed vertex subsets: one row of uint64 words per hyperedge."""
import numpy as np


def n_words(n):
    return max(1, (n + 63) // 64)


def pack(flags):
    """Pack a boolean array ``(..., n)`` into ``(..., n_words(n))`` uint64."""
    flags = np.asarray(flags, dtype=bool)
    n = flags.shape[-1]
    w = n_words(n)
    pad = w * 64 - n
    if pad:
        widths = [(0, 0)] * (flags.ndim - 1) + [(0, pad)]
        flags = np.pad(flags, widths)
    packed = np.packbits(flags, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack(masks, n):
    masks = np.ascontiguousarray(masks, dtype="<u8")
    as_bytes = masks.view(np.uint8)
    flags = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return flags[..., :n].astype(bool)


def from_indices(indices, n):
    flags = np.zeros(n, dtype=bool)
    flags[list(indices)] = True
    return pack(flags)


def to_indices(row):
    out = []
    for w, word in enumerate(np.asarray(row, dtype=np.uint64).tolist()):
        base = 64 * w
        while word:
            low = word & -word
            out.append(base + low.bit_length() - 1)
            word ^= low
    return tuple(out)


if hasattr(np, "bitwise_count"):
    def popcount(masks):
        return np.bitwise_count(np.asarray(masks, dtype=np.uint64)).sum(axis=-1).astype(np.int64)
else:  # numpy < 2
    def popcount(masks):
        masks = np.ascontiguousarray(masks, dtype="<u8")
        return np.unpackbits(masks.view(np.uint8), axis=-1).sum(axis=-1).astype(np.int64)


def _void_view(masks):
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    return masks.view(np.dtype((np.void, 8 * masks.shape[1]))).ravel()


def unique_rows(masks):
    """Distinct rows (sorted) and the index of each row's first occurrence."""
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    if len(masks) == 0:
        return masks.reshape(0, masks.shape[1] if masks.ndim == 2 else 1), np.zeros(0, dtype=np.int64)
    _, first = np.unique(_void_view(masks), return_index=True)
    return masks[first], first.astype(np.int64)


def row_keys(masks):
    """Hashable keys for rows (used for set operations between catalogs)."""
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    return set(_void_view(masks).tolist())


def nonzero_rows(masks):
    return np.any(masks != 0, axis=-1)
