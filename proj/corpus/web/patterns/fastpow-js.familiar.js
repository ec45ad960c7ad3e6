function fastPower(base, exp, mod) {
  if (mod) {
    base %= mod;
  }
  let result = 1;
  while (exp > 0) {
    if (exp & 1) {
      result = result * base;
      if (mod) {
        result %= mod;
      }
    }
    base = base * base;
    if (mod) {
      base %= mod;
    }
    exp >>= 1;
  }
  return result;
}
