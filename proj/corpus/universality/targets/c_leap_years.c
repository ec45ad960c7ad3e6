int count_leap_years(int first, int last) {
    int count = 0;
    for (int year = first; year <= last; year++) {
        if (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)) {
            count++;
        }
    }
    return count;
}
