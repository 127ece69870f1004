"""Regenerates the sample circuits in this directory.

Gates are limited to rx/ry/rz and cx/cz, so multi-qubit primitives are
decomposed here.
"""

import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


class Builder:
    def __init__(self, name, n):
        self.name = name
        self.n = n
        self.lines = []

    def rot(self, axis, angle, q):
        self.lines.append(f"r{axis}({angle:.12g}) q[{q}];")

    def h(self, q):
        self.rot("z", math.pi, q)
        self.rot("y", math.pi / 2, q)

    def cx(self, a, b):
        self.lines.append(f"cx q[{a}],q[{b}];")

    def cz(self, a, b):
        self.lines.append(f"cz q[{a}],q[{b}];")

    def cphase(self, theta, a, b):
        self.rot("z", theta / 2, a)
        self.rot("z", theta / 2, b)
        self.cx(a, b)
        self.rot("z", -theta / 2, b)
        self.cx(a, b)

    def ccx(self, a, b, c):
        t = math.pi / 4
        self.h(c)
        self.cx(b, c)
        self.rot("z", -t, c)
        self.cx(a, c)
        self.rot("z", t, c)
        self.cx(b, c)
        self.rot("z", -t, c)
        self.cx(a, c)
        self.rot("z", t, b)
        self.rot("z", t, c)
        self.h(c)
        self.cx(a, b)
        self.rot("z", t, a)
        self.rot("z", -t, b)
        self.cx(a, b)

    def text(self):
        head = [f"// circuit: {self.name}", "OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        return "\n".join(head + self.lines) + "\n"


def qft(n):
    b = Builder(f"qft_{n}", n)
    for i in range(n):
        b.h(i)
        for j in range(i + 1, n):
            b.cphase(math.pi / 2 ** (j - i), j, i)
    return b


def adder(bits):
    # ripple-carry adder on a, b and a carry chain
    n = 3 * bits + 1
    b = Builder(f"adder_{n}", n)
    a = list(range(bits))
    bb = list(range(bits, 2 * bits))
    c = list(range(2 * bits, n))
    for i in range(bits):
        b.ccx(a[i], bb[i], c[i + 1])
        b.cx(a[i], bb[i])
        b.ccx(c[i], bb[i], c[i + 1])
    for i in range(bits):
        b.cx(c[i], bb[i])
    return b


def grover(n, iterations):
    b = Builder(f"grover_{n}", n)
    for q in range(n):
        b.h(q)
    for _ in range(iterations):
        # oracle marking |11..1> via a cz ladder on pairs
        for q in range(n - 1):
            b.cz(q, q + 1)
        for q in range(n):
            b.h(q)
            b.rot("x", math.pi, q)
        for q in range(n - 1):
            b.cz(q, q + 1)
        for q in range(n):
            b.rot("x", math.pi, q)
            b.h(q)
    return b


def random_circuit(n, depth, seed):
    rng = random.Random(seed)
    b = Builder(f"random_{n}", n)
    for _ in range(depth):
        qs = list(range(n))
        rng.shuffle(qs)
        for k in range(0, n - 1, 2):
            if rng.random() < 0.6:
                b.cx(qs[k], qs[k + 1])
            else:
                b.rot(rng.choice("xyz"), rng.uniform(-math.pi, math.pi), qs[k])
                b.rot(rng.choice("xyz"), rng.uniform(-math.pi, math.pi), qs[k + 1])
    return b


def volume(n, seed):
    rng = random.Random(seed)
    b = Builder(f"volume_{n}", n)
    for _ in range(n):
        qs = list(range(n))
        rng.shuffle(qs)
        for k in range(0, n - 1, 2):
            x, y = qs[k], qs[k + 1]
            for _ in range(3):
                b.rot("z", rng.uniform(-math.pi, math.pi), x)
                b.rot("y", rng.uniform(-math.pi, math.pi), y)
                b.cx(x, y)
    return b


def main():
    circuits = [qft(4), qft(8), adder(2), grover(4, 2), random_circuit(8, 10, 11), random_circuit(16, 8, 12), volume(6, 13)]
    for c in circuits:
        (HERE / f"{c.name}.qasm").write_text(c.text())
        print(c.name, len(c.lines))


if __name__ == "__main__":
    main()
