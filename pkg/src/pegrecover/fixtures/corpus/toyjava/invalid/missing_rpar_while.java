public class Main {
  public static void main(String[] args) {
    int n = 3;
    while (0 < n {
      n = n - 1;
    }
  }
}
