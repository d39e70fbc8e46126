#!/usr/bin/env python3
"""Generate include/xsp/detail/unicode_data.inc from Python's unicodedata.

The tables cover canonical (NFC/NFD) normalization and per-codepoint full
lowercase mappings:

  * kDecomp / kDecompData   full canonical decompositions (NFD), Hangul
                            syllables excluded (handled algorithmically)
  * kCompPair               immediate canonical composition pairs, with
                            composition exclusions already applied
  * kCcc                    nonzero canonical combining classes
  * kLower / kLowerData     full lowercase expansions

Run from the repository root:  python3 scripts/gen_unicode_tables.py
"""

import sys
import unicodedata

OUT = "include/xsp/detail/unicode_data.inc"

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def is_hangul_syllable(cp):
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def main():
    decomp = []        # (cp, [cps...]) full NFD expansion
    comp_pairs = []    # (a, b, composed)
    ccc = []           # (cp, class)
    lower = []         # (cp, [cps...])

    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)

        cls = unicodedata.combining(ch)
        if cls:
            ccc.append((cp, cls))

        if not is_hangul_syllable(cp):
            nfd = unicodedata.normalize("NFD", ch)
            if nfd != ch:
                decomp.append((cp, [ord(c) for c in nfd]))

            raw = unicodedata.decomposition(ch)
            if raw and not raw.startswith("<"):
                parts = [int(p, 16) for p in raw.split()]
                if len(parts) == 2:
                    a, b = parts
                    # NFC round-trip filters out composition exclusions.
                    if unicodedata.normalize("NFC", chr(a) + chr(b)) == ch:
                        comp_pairs.append((a, b, cp))

        lo = ch.lower()
        if lo != ch:
            lower.append((cp, [ord(c) for c in lo]))

    comp_pairs.sort(key=lambda t: (t[0] << 21) | t[1])

    def indexed_table(entries):
        data = []
        index = []
        for cp, cps in entries:
            index.append((cp, len(data), len(cps)))
            data.extend(cps)
        return index, data

    decomp_index, decomp_data = indexed_table(decomp)
    lower_index, lower_data = indexed_table(lower)

    with open(OUT, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_tables.py from Python "
          "unicodedata %s. Do not edit.\n\n" % unicodedata.unidata_version)

        w("inline constexpr std::uint32_t kDecompData[] = {\n")
        for i in range(0, len(decomp_data), 12):
            w("  " + ",".join("0x%X" % c for c in decomp_data[i:i + 12]) + ",\n")
        w("};\n\n")

        w("inline constexpr IndexedEntry kDecomp[] = {\n")
        for cp, off, n in decomp_index:
            w("  {0x%X,%d,%d},\n" % (cp, off, n))
        w("};\n\n")

        w("inline constexpr std::uint32_t kLowerData[] = {\n")
        for i in range(0, len(lower_data), 12):
            w("  " + ",".join("0x%X" % c for c in lower_data[i:i + 12]) + ",\n")
        w("};\n\n")

        w("inline constexpr IndexedEntry kLower[] = {\n")
        for cp, off, n in lower_index:
            w("  {0x%X,%d,%d},\n" % (cp, off, n))
        w("};\n\n")

        w("inline constexpr CccEntry kCcc[] = {\n")
        for cp, cls in ccc:
            w("  {0x%X,%d},\n" % (cp, cls))
        w("};\n\n")

        w("inline constexpr CompEntry kCompPair[] = {\n")
        for a, b, c in comp_pairs:
            w("  {0x%XULL,0x%X},\n" % ((a << 21) | b, c))
        w("};\n")

    sys.stderr.write(
        "decomp=%d (data %d) lower=%d (data %d) ccc=%d comp=%d -> %s\n"
        % (len(decomp_index), len(decomp_data), len(lower_index),
           len(lower_data), len(ccc), len(comp_pairs), OUT))


if __name__ == "__main__":
    main()
