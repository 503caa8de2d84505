#!/usr/bin/env python3
"""Export the UCI 8x8 handwritten digits set (as bundled with scikit-learn)
to the header-less CSV layout read by fedscalar::data::load_digits.

Each line: 64 integer pixel values in 0..16, then the label 0..9.
ASCII, comma separated, LF line endings, no spaces.
"""
import sys

from sklearn.datasets import load_digits


def main(path):
    digits = load_digits()
    with open(path, "w", newline="\n", encoding="ascii") as out:
        for pixels, label in zip(digits.data, digits.target):
            fields = [str(int(p)) for p in pixels] + [str(int(label))]
            out.write(",".join(fields) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/digits.csv")
