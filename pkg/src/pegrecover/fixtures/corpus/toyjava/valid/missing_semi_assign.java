public class Main {
  public static void main(String[] args) {
    int m = 0;
    m = m + 1;
    m = m * 2;
  }
}
