#!/usr/bin/env python3
"""Generate tests/fixtures/unicode_cases.tsv with reference normalization
results computed by Python's unicodedata.

Columns (each a space-separated list of hex code points; `-` = empty):
  input  NFC(input)  NFD(input)  NFC(lower(NFC(input)))

Run from the repository root:  python3 scripts/gen_unicode_fixture.py
"""

import random
import unicodedata

OUT = "tests/fixtures/unicode_cases.tsv"

FIXED = [
    "8 am",
    "Jouez à Elvis",
    "Jouez à Elvis",            # decomposed à
    "é",                        # e + combining acute
    "é",
    "Å",                   # A + ring -> Å
    "Å",                         # angstrom sign -> Å
    "ṩ",                         # s with dot below and dot above
    "ṩ",                  # needs canonical reordering
    "İstanbul",                  # Turkish dotted capital I
    "MADRID",
    "ĞİŞÇÖÜığşç",
    "가힣",                   # Hangul syllables
    "가",                   # Hangul jamo pair -> composes
    "Σςσ",             # Greek sigmas
    "ya aura-t-il du brouillard",
    "",
    "cancelar recordatorio para llamar al dentista",
    "सीता",       # Devanagari
    "เมื่อไร",  # Thai
]

# Ranges that exercise decomposition/composition/ccc machinery.
RANGES = [
    (0x0020, 0x007E), (0x00A0, 0x024F), (0x0300, 0x036F), (0x0370, 0x03FF),
    (0x0400, 0x04FF), (0x1E00, 0x1EFF), (0x3040, 0x30FF), (0xAC00, 0xD7A3),
    (0x0590, 0x05FF), (0x0900, 0x097F), (0x1F00, 0x1FFF), (0xFB00, 0xFB4F),
]


def rand_string(rng):
    n = rng.randint(1, 24)
    cps = []
    for _ in range(n):
        lo, hi = RANGES[rng.randrange(len(RANGES))]
        cp = rng.randint(lo, hi)
        if 0xD800 <= cp <= 0xDFFF:
            cp = 0x20
        cps.append(cp)
    return "".join(chr(c) for c in cps)


def hexlist(s):
    return " ".join("%04X" % ord(c) for c in s) if s else "-"


def main():
    rng = random.Random(20210714)
    cases = list(FIXED) + [rand_string(rng) for _ in range(300)]
    with open(OUT, "w") as f:
        for s in cases:
            nfc = unicodedata.normalize("NFC", s)
            nfd = unicodedata.normalize("NFD", s)
            low = unicodedata.normalize("NFC", unicodedata.normalize("NFC", s).lower())
            f.write("\t".join(hexlist(x) for x in (s, nfc, nfd, low)) + "\n")
    print("wrote %d cases -> %s" % (len(cases), OUT))


if __name__ == "__main__":
    main()
