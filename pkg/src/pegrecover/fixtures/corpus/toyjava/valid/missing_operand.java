public class Main {
  public static void main(String[] args) {
    int d = 1;
    d = d * 3 + 2;
  }
}
