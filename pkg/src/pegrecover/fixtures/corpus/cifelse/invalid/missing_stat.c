int x;
if (x) return 1; else
int y;
