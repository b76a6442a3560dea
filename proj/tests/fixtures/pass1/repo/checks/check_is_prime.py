import mathops as m

assert [n for n in range(20) if m.is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
