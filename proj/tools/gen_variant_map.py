#!/usr/bin/env python3
# Copyright 2026 The translit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates data/variants.tsv from the Unicode compatibility mappings.

Arabic presentation forms are folded to their nominal letters, then the
Arabic Yeh/Kaf letters are folded to the Persian Farsi Yeh/Keheh. Mappings
that would introduce harakat, tatweel or spaces are skipped so folding never
changes diacritics.
"""
import sys
import unicodedata

BASE = [
    (0x064A, 0x06CC, "ARABIC YEH -> FARSI YEH"),
    (0x0649, 0x06CC, "ALEF MAKSURA -> FARSI YEH"),
    (0x0643, 0x06A9, "ARABIC KAF -> KEHEH"),
    (0x06C1, 0x0647, "HEH GOAL -> HEH"),
]
PUNCT = [
    (0x2010, 0x002D), (0x2011, 0x002D), (0x2012, 0x002D), (0x2013, 0x002D),
    (0x2018, 0x0027), (0x2019, 0x0027), (0x02BC, 0x0027),
]
FOLD = {src: dst for src, dst, _ in BASE}


def forbidden(cp):
    return cp == 0x0640 or 0x064B <= cp <= 0x065F or cp == 0x0670 or cp == 0x20


def main():
    out = sys.stdout
    out.write("# translit variant map\n")
    out.write("# name: perso-arabic-default\n# version: 1\n")
    out.write(f"# generated from Unicode {unicodedata.unidata_version} "
              "compatibility mappings by tools/gen_variant_map.py\n")
    out.write("# format: SRC<TAB>DST[<TAB>GROUP]; hex codepoints separated by "
              "spaces; rules with a GROUP are disabled unless enabled in config\n")
    for src, dst, note in BASE:
        out.write(f"{src:04X}\t{dst:04X}\t# {note}\n")
    for src, dst in PUNCT:
        out.write(f"{src:04X}\t{dst:04X}\t# {unicodedata.name(chr(src))}\n")
    ranges = list(range(0xFB50, 0xFE00)) + list(range(0xFE70, 0xFF00))
    for cp in ranges:
        ch = chr(cp)
        try:
            name = unicodedata.name(ch)
        except ValueError:
            continue
        nfkc = unicodedata.normalize("NFKC", ch)
        if nfkc == ch:
            continue
        cps = [ord(c) for c in nfkc]
        if any(forbidden(c) for c in cps):
            continue
        if not all(0x0600 <= c <= 0x06FF for c in cps):
            continue
        cps = [FOLD.get(c, c) for c in cps]
        dst = " ".join(f"{c:04X}" for c in cps)
        out.write(f"{cp:04X}\t{dst}\t# {name}\n")
    for i in range(10):
        out.write(f"{0x0660 + i:04X}\t{0x06F0 + i:04X}\tarabic-indic-to-extended\n")
    for i in range(10):
        out.write(f"{0x06F0 + i:04X}\t{0x0660 + i:04X}\textended-to-arabic-indic\n")


if __name__ == "__main__":
    main()
