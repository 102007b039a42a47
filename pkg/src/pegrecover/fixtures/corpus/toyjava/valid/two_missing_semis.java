public class Main {
  public static void main(String[] args) {
    int p = 1;
    int q = 2;
    p = q;
  }
}
