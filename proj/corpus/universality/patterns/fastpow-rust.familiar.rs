fn fast_power(base: u64, exp: u32, modulus: Option<u64>) -> u64 {
    let mut base = base;
    let mut exp = exp;
    if let Some(m) = modulus {
        base %= m;
    }
    let mut result: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            result *= base;
            if let Some(m) = modulus {
                result %= m;
            }
        }
        base *= base;
        if let Some(m) = modulus {
            base %= m;
        }
        exp >>= 1;
    }
    result
}
