public class Main {
  public static void main(String[] args) {
    int j = 0;
    if (j == 0) j = 1;
    j = 2;
  }
}
