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


def test_compute(x):
    total = helper(x)
    return total
