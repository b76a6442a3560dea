import mathops as m

assert m.add(2, 3) == 5
assert m.add(-1, 1) == 0
