#!/usr/bin/env python3
"""Independent NSEC3 hashing oracle (RFC 5155 section 5) and salt search.

Used to derive the frozen constants of the mixed NSEC/NSEC3 scenario:
a salt under which b.example carries the largest hash of the zone,
the apex the smallest, and *.example falls inside b.example's span.
"""
import base64
import hashlib
import sys

B32 = "0123456789ABCDEFGHIJKLMNOPQRSTUV"
STD = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567"


def wire(name):
    out = b""
    for label in [l for l in name.lower().split(".") if l]:
        raw = label.encode().replace(b"\\000", b"\x00")
        out += bytes([len(raw)]) + raw
    return out + b"\x00"


def nsec3(name, salt_hex, iterations):
    salt = bytes.fromhex(salt_hex) if salt_hex not in ("", "-") else b""
    digest = hashlib.sha1(wire(name) + salt).digest()
    for _ in range(iterations):
        digest = hashlib.sha1(digest + salt).digest()
    std = base64.b32encode(digest).decode().rstrip("=")
    return std.translate(str.maketrans(STD, B32)).lower()


def covered(h, owner, nxt):
    if owner < nxt:
        return owner < h < nxt
    return h > owner or h < nxt


def search():
    zone = ["example", "a.example", "b.example", "c.example"]
    for i in range(1, 1 << 16):
        salt = "%04x" % i
        hs = {n: nsec3(n, salt, 0) for n in zone}
        if max(hs, key=hs.get) != "b.example" or min(hs, key=hs.get) != "example":
            continue
        if not covered(nsec3("*.example", salt, 0), hs["b.example"], hs["example"]):
            continue
        # attack query: canonically between b.example and c.example
        for j in range(26 * 26):
            q = "b%s%s.example" % (chr(97 + j // 26), chr(97 + j % 26))
            if covered(nsec3(q, salt, 0), hs["b.example"], hs["example"]):
                return salt, hs, q
    raise SystemExit("no salt found")


if __name__ == "__main__":
    if len(sys.argv) == 4:
        print(nsec3(sys.argv[1], sys.argv[2], int(sys.argv[3])))
        sys.exit(0)
    salt, hs, q = search()
    print("salt", salt)
    for n, h in sorted(hs.items(), key=lambda kv: kv[1]):
        print(n, h)
    print("*.example", nsec3("*.example", salt, 0))
    print("query", q, nsec3(q, salt, 0))
