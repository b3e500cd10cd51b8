#!/usr/bin/env python3
"""Independent re-derivation of the entropy conformance vectors.

Rebuilds every CDF from its logits and re-encodes every rANS case with a
plain big-integer implementation, then compares against the JSON file.
"""
import json
import sys

TEMPLATE = [60000] + [369] * 14 + [370]
LOW = 1 << 23


def cdf_of(logits):
    order = sorted(range(16), key=lambda r: (-(1000 * logits[r] - r)))
    count = [0] * 16
    for rank, sym in enumerate(order):
        count[sym] = TEMPLATE[rank]
    cdf = [0]
    for c in count:
        cdf.append(cdf[-1] + c)
    return cdf


def rans_encode(symbols, cdfs):
    x = LOW
    out = []
    for s, cdf in zip(reversed(symbols), reversed(cdfs)):
        f, c = cdf[s + 1] - cdf[s], cdf[s]
        while x >= ((LOW >> 16) << 8) * f:
            out.append(x & 0xFF)
            x >>= 8
        x = (x // f) * 65536 + x % f + c
    return bytes(x.to_bytes(4, "little")) + bytes(reversed(out))


def main(path):
    doc = json.load(open(path))
    bad = 0
    for i, rec in enumerate(doc["cdf"]):
        if cdf_of(rec["logits"]) != rec["cdf"]:
            print(f"cdf record {i} mismatch")
            bad += 1
    for i, rec in enumerate(doc["rans"]):
        cdfs = [cdf_of(z) for z in rec["logits"]]
        if rans_encode(rec["symbols"], cdfs).hex() != rec["bytes"]:
            print(f"rans record {i} mismatch")
            bad += 1
    print(f"{len(doc['cdf'])} cdf records, {len(doc['rans'])} rans records, {bad} mismatches")
    return 1 if bad or len(doc["cdf"]) < 100 else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
