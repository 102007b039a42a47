if (x return 1;
int y;
