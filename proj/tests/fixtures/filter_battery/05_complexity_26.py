def helper(v):
    return v
CONST_2 = 2
CONST_3 = 3
CONST_4 = 4
CONST_5 = 5
CONST_6 = 6
CONST_7 = 7
CONST_8 = 8
CONST_9 = 9
CONST_10 = 10
CONST_11 = 11
CONST_12 = 12
CONST_13 = 13
CONST_14 = 14
CONST_15 = 15
CONST_16 = 16
CONST_17 = 17
CONST_18 = 18
CONST_19 = 19
CONST_20 = 20
CONST_21 = 21
CONST_22 = 22
CONST_23 = 23
CONST_24 = 24
CONST_25 = 25
CONST_26 = 26
CONST_27 = 27
CONST_28 = 28
CONST_29 = 29


def compute(x):
    total = helper(x)
    if x > 0:
        total += 0
    if x > 1:
        total += 1
    if x > 2:
        total += 2
    if x > 3:
        total += 3
    if x > 4:
        total += 4
    if x > 5:
        total += 5
    if x > 6:
        total += 6
    if x > 7:
        total += 7
    if x > 8:
        total += 8
    if x > 9:
        total += 9
    if x > 10:
        total += 10
    if x > 11:
        total += 11
    ok = x > 0 and x > 1 and x > 2 and x > 3 and x > 4 and x > 5 and x > 6 and x > 7 and x > 8 and x > 9 and x > 10 and x > 11 and x > 12 and x > 13
    return total
