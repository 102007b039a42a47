{ y; }
{ y; if (y) if (z) a; else b; }
int z;
