"""The VV codec: parsing dictionary construction, phrase codebooks, and
lossless encode/decode with self-delimiting framing.

Bitstream layout (bit-exact):

    [magic byte 0x56]
    [varint phrase_count]                  (LEB128, byte-aligned)
    [phrase codewords, MSB-first packed]
    [varint remainder_length]              (LEB128 bytes, bit-packed unaligned)
    [remainder symbols, ceil(log2 k) bits each]
    [zero padding to the next byte boundary]

The remainder carries the trailing suffix the parser could not complete,
so every finite stream round-trips exactly.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .dictionary import FiniteDictionary, parse
from .errors import CorruptBitstreamError, UnsupportedOperationError
from .source import SourceModel, Word, canon_key, sort_words

MAGIC = 0x56

PROB_SUM_TOL = 1e-9


def kraft_sum(codewords) -> Fraction:
    """Exact sum of 2^-len over the codewords."""
    return sum(Fraction(1, 2 ** len(c)) for c in codewords)


@dataclass(frozen=True)
class PhraseCodebook:
    """Bijection between dictionary phrases and binary codewords.

    Phrases are kept in canonical order; codewords are '0'/'1' strings,
    verified prefix-free with Kraft sum <= 1.
    """

    phrases: tuple
    codewords: tuple
    frame: str = "count-prefixed-v1"

    def __post_init__(self):
        if not self.phrases:
            raise ValueError("codebook needs at least one phrase")
        if len(self.phrases) != len(self.codewords):
            raise ValueError("phrase/codeword count mismatch")
        if len(set(self.phrases)) != len(self.phrases):
            raise ValueError("duplicate phrases in codebook")
        if len(set(self.codewords)) != len(self.codewords):
            raise ValueError("duplicate codewords in codebook")
        for c in self.codewords:
            if not c or any(b not in "01" for b in c):
                raise ValueError(f"codeword {c!r} is not a nonempty binary string")
        cs = sorted(self.codewords)
        for a, b in zip(cs, cs[1:]):
            if b.startswith(a):
                raise ValueError(f"codewords not prefix-free: {a!r} prefixes {b!r}")
        if kraft_sum(self.codewords) > 1:
            raise ValueError("codewords violate the Kraft inequality")

    @classmethod
    def from_pairs(cls, pairs) -> "PhraseCodebook":
        pairs = sorted(((tuple(w), c) for w, c in pairs), key=lambda t: canon_key(t[0]))
        return cls(
            phrases=tuple(w for w, _ in pairs),
            codewords=tuple(c for _, c in pairs),
        )

    def codeword_for(self, phrase: Word) -> str:
        return self._encode_map()[phrase]

    def _encode_map(self):
        m = getattr(self, "_map", None)
        if m is None:
            m = dict(zip(self.phrases, self.codewords))
            object.__setattr__(self, "_map", m)
        return m

    def expected_length(self, source: SourceModel) -> float:
        """Mean codeword length under the source's phrase probabilities."""
        return math.fsum(
            source.word_prob(w) * len(c)
            for w, c in zip(self.phrases, self.codewords)
        )

    def as_dict(self):
        return {
            "phrases": [list(w) for w in self.phrases],
            "codewords": list(self.codewords),
        }


def tunstall_build(source: SourceModel, target_size: int) -> FiniteDictionary:
    """Greedy variable-to-fixed dictionary: start from D = A and repeatedly
    extend the most probable word until another extension would exceed
    target_size. Ties break in canonical word order, so builds are
    deterministic. The result is proper and complete by construction."""
    k = source.alphabet_size
    if k is None:
        raise UnsupportedOperationError(
            "Tunstall construction needs a finite alphabet (each extension "
            "of a countable alphabet adds infinitely many words)"
        )
    if k < 2:
        raise ValueError("Tunstall construction needs alphabet size >= 2")
    if target_size < k:
        raise ValueError(f"target size {target_size} below alphabet size {k}")
    heap = [(-source.probs[i], 1, (i,)) for i in range(k)]
    heapq.heapify(heap)
    count = k
    while count + (k - 1) <= target_size:
        neg_p, _, w = heapq.heappop(heap)
        for b in range(k):
            child = w + (b,)
            heapq.heappush(heap, (neg_p * source.probs[b], len(child), child))
        count += k - 1
    words = [w for _, _, w in heap]
    return FiniteDictionary(k, words)


def huffman_build(phrase_probs) -> PhraseCodebook:
    """Optimal binary prefix code over (phrase, probability) pairs.

    Two-queue construction: leaves enter sorted ascending by (probability,
    canonical phrase order); merged nodes queue in creation order; each
    merge pops the two cheapest fronts, preferring the leaf queue on equal
    weight, and the first pop takes branch bit 0. A single phrase gets the
    degenerate codeword "0".
    """
    items = [(tuple(w), float(p)) for w, p in phrase_probs]
    if not items:
        raise ValueError("cannot build a codebook over zero phrases")
    if any(p <= 0.0 for _, p in items):
        raise ValueError("phrase probabilities must be positive")
    total = math.fsum(p for _, p in items)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"phrase probabilities sum to {total}, not 1")
    if len(items) == 1:
        return PhraseCodebook.from_pairs([(items[0][0], "0")])

    leaves = deque(
        {"w": p, "phrase": w, "kids": None}
        for w, p in sorted(items, key=lambda t: (t[1], canon_key(t[0])))
    )
    merged = deque()

    def pop_min():
        if leaves and merged:
            return leaves.popleft() if leaves[0]["w"] <= merged[0]["w"] else merged.popleft()
        return leaves.popleft() if leaves else merged.popleft()

    while len(leaves) + len(merged) > 1:
        a = pop_min()
        b = pop_min()
        merged.append({"w": a["w"] + b["w"], "phrase": None, "kids": (a, b)})

    root = merged.popleft()
    pairs = []
    stack = [(root, "")]
    while stack:
        node, code = stack.pop()
        if node["kids"] is None:
            pairs.append((node["phrase"], code))
        else:
            a, b = node["kids"]
            stack.append((a, code + "0"))
            stack.append((b, code + "1"))
    return PhraseCodebook.from_pairs(pairs)


def fixed_codebook(phrases) -> PhraseCodebook:
    """Fixed-width indexing of phrases in canonical order: ceil(log2 n) bits.

    Mirrors a literal variable-to-fixed string encoder.
    """
    ws = sort_words(tuple(w) for w in phrases)
    if not ws:
        raise ValueError("cannot build a codebook over zero phrases")
    width = max(1, (len(ws) - 1).bit_length())
    return PhraseCodebook.from_pairs(
        (w, format(i, f"0{width}b")) for i, w in enumerate(ws)
    )


def symbol_bit_width(alphabet_size: int) -> int:
    """Bits per remainder symbol: ceil(log2 k), 0 for the unary alphabet."""
    return (alphabet_size - 1).bit_length()


class _BitWriter:
    def __init__(self):
        self.buf = bytearray()
        self.acc = 0
        self.nbits = 0

    def write_uint(self, value: int, width: int):
        for shift in range(width - 1, -1, -1):
            self.acc = (self.acc << 1) | ((value >> shift) & 1)
            self.nbits += 1
            if self.nbits == 8:
                self.buf.append(self.acc)
                self.acc = 0
                self.nbits = 0

    def write_code(self, code: str):
        for b in code:
            self.write_uint(b == "1", 1)

    def write_varint(self, value: int):
        while value >= 0x80:
            self.write_uint((value & 0x7F) | 0x80, 8)
            value >>= 7
        self.write_uint(value, 8)

    def getvalue(self) -> bytes:
        if self.nbits:
            self.buf.append(self.acc << (8 - self.nbits))
            self.acc = 0
            self.nbits = 0
        return bytes(self.buf)


class _BitReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.total = 8 * len(data)

    def read_uint(self, width: int) -> int:
        if self.pos + width > self.total:
            raise CorruptBitstreamError("unexpected end of stream", self.pos)
        value = 0
        pos = self.pos
        data = self.data
        for _ in range(width):
            value = (value << 1) | ((data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
        self.pos = pos
        return value

    def read_varint(self) -> int:
        value = 0
        shift = 0
        while True:
            byte = self.read_uint(8)
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise CorruptBitstreamError("varint too long", self.pos)

    def remaining(self) -> int:
        return self.total - self.pos


def encode(d: FiniteDictionary, cb: PhraseCodebook, stream) -> bytes:
    """Parse the stream with d and emit the framed bitstream.

    Requires the codebook to cover exactly the dictionary words; symbols
    outside the alphabet are rejected.
    """
    if set(cb.phrases) != d.word_set:
        raise ValueError("codebook phrases do not match the dictionary words")
    seq = list(stream)
    k = d.alphabet_size
    for s in seq:
        if not (0 <= s < k):
            raise ValueError(f"stream symbol {s} outside alphabet of size {k}")
    phrases, remainder = parse(d, seq)
    enc = cb._encode_map()
    w = _BitWriter()
    w.write_uint(MAGIC, 8)
    w.write_varint(len(phrases))
    for ph in phrases:
        w.write_code(enc[ph])
    w.write_varint(len(remainder))
    width = symbol_bit_width(k)
    for s in remainder:
        w.write_uint(s, width)
    return w.getvalue()


def decode(d: FiniteDictionary, cb: PhraseCodebook, data: bytes) -> list:
    """Exact inverse of encode for the same (dictionary, codebook)."""
    if set(cb.phrases) != d.word_set:
        raise ValueError("codebook phrases do not match the dictionary words")
    r = _BitReader(data)
    if r.read_uint(8) != MAGIC:
        raise CorruptBitstreamError("bad magic byte", 0)
    n_phrases = r.read_varint()

    table = {}
    for ph, code in zip(cb.phrases, cb.codewords):
        node = table
        for b in code[:-1]:
            node = node.setdefault(b, {})
            if not isinstance(node, dict):
                raise CorruptBitstreamError("codebook trie corrupted", r.pos)
        node[code[-1]] = ph

    out = []
    for _ in range(n_phrases):
        node = table
        while True:
            bit = "1" if r.read_uint(1) else "0"
            nxt = node.get(bit)
            if nxt is None:
                raise CorruptBitstreamError("bits match no codeword", r.pos)
            if isinstance(nxt, dict):
                node = nxt
                continue
            out.extend(nxt)
            break
    rem_len = r.read_varint()
    width = symbol_bit_width(d.alphabet_size)
    for _ in range(rem_len):
        s = r.read_uint(width)
        if s >= d.alphabet_size:
            raise CorruptBitstreamError(f"remainder symbol {s} out of range", r.pos)
        out.append(s)
    if r.remaining() >= 8:
        raise CorruptBitstreamError("dangling bytes after padding", r.pos)
    if r.remaining() and r.read_uint(r.remaining()) != 0:
        raise CorruptBitstreamError("nonzero padding bits", r.pos)
    return out
