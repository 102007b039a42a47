int x;
if (x) return 1; else return 0;
int y;
