public class Main {
  public static void main(String[] args) {
    int u = 1;
    u = u - 1;
    u = u + 4;
  }
}
