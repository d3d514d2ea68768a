#!/usr/bin/env python3
# ZDT1 over [0,1]^d; infeasible when x0 + x1 > 1.5.
import json, math, sys

x = json.loads(sys.stdin.readline())["x"]
if x[0] + x[1] > 1.5:
    print(json.dumps({"feasible": False}))
    sys.exit(0)
g = 1 + 9 * sum(x[1:]) / (len(x) - 1)
f1 = x[0]
f2 = g * (1 - math.sqrt(f1 / g))
print(json.dumps({"objectives": [f1, f2], "feasible": True}))
