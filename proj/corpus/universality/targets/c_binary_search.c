int find_index(const int *values, int count, int wanted) {
    int low = 0;
    int high = count - 1;
    while (low <= high) {
        int mid = low + (high - low) / 2;
        if (values[mid] == wanted) {
            return mid;
        }
        if (values[mid] < wanted) {
            low = mid + 1;
        } else {
            high = mid - 1;
        }
    }
    return -1;
}
