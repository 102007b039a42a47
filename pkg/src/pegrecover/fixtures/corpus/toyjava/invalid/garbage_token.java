public class Main {
  public static void main(String[] args) {
    int w = 1;
    w = w @ 1;
  }
}
